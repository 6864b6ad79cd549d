#pragma once

#include "rank1/groupcore.hpp"
#include "rank1/report.hpp"

#include <map>
#include <memory>
#include <optional>
#include <random>

namespace rank1 {

// Descending commutator series and ascending centralizer series; the
// subquotient W/(W cap Z) satisfies [ , G] = itself with trivial fixed space.
struct NormalFormResult {
  la::Subspace w;  // intersection of V >= [V,G] >= [[V,G],G] >= ...
  la::Subspace z;  // union of the ascending centralizer series
  bool already_normal = false;
};
NormalFormResult reduce_to_normal_form(const Ground& g, int vdim,
                                       const std::vector<GMat>& gens);

// h = h_{a_1} ... h_{a_k}, each a_i an element of the zero part given by its
// family parameter vector
struct HWord {
  std::vector<GVec> factors;
};

// A unital subring of End(C_V(A)) with a recorded generator expansion per
// basis element: every element is a sum of restrictions of Hua words.
struct RingClosure {
  int m = 0;  // matrices are m x m
  std::vector<GMat> basis;
  std::vector<std::vector<HWord>> expansions;  // empty for matrix-only closures
  la::Subspace flat;
  // product of two basis elements that landed back in the span: the word list
  // and the coordinates give two expansions of the same element
  struct Relation {
    std::vector<HWord> words;
    GVec coords;
  };
  std::vector<Relation> relations;

  bool contains(const Ground& g, const GMat& x) const;
  std::optional<GVec> coords(const Ground& g, const GMat& x) const;
  GMat from_coords(const Ground& g, const GVec& c) const;
  int dim() const { return static_cast<int>(basis.size()); }
  void finalize(const Ground& g);  // factor the coordinate solver

 private:
  la::PreparedSolve solver_;
};

struct PipelineOptions {
  int samples = 24;
  unsigned long seed = 1;
  bool reentry = false;  // summand re-run: skip construction-level stages
};

struct QuatIdentification {
  bool ok = false;
  std::string detail;
  std::vector<GVec> image_coords;  // R-coordinates of 1, i, j, k
};

class Pipeline {
 public:
  Pipeline(const Instance& inst, PipelineOptions opt, Report& rep);

  // Runs every applicable stage, appending one record per check.
  void run();

  // ---- state, exposed for the driver and the tests ----
  const Instance& inst;
  PipelineOptions opt;
  Report& rep;
  Ground g;
  std::unique_ptr<RankOneCtx> ctx;
  CubicVerdict verdict;

  la::Subspace a0params, b0params;
  la::Subspace cvg0;
  bool a_abelian = false;
  bool rank_one_total = true;  // b(a) solvable across the sampled family

  GVec e_param;
  GMat e_mat, mu_mat, mu_inv;
  int m = 0;  // ground dimension of C_V(A)

  RingClosure J, R, S;
  bool r_eq_s = false;
  bool j_commutative = true;

  GMat star;  // involution on R-coordinates (dim R x dim R)
  bool star_built = false;

  // Abar = A / A_0 in linear coordinates via the induced map on V/C_V(A)
  int abar_dim = 0;
  std::vector<GVec> abar_kappa_basis;   // kappa images of the basis elements
  std::vector<GMat> abar_basis_elems;   // the chosen representatives
  bool abar_ready = false;

  GVec v0;           // base vector of C_V(A)
  GMat mphi;         // abar_dim x vdim matrix of a -> Phi(v0, a)
  bool coord_ready = false;

  // ---- building blocks (valid once the corresponding stage ran) ----
  GMat h_of_a0(const GVec& a0param);          // mu mu_a for a in the zero part
  std::optional<GMat> h_of(const GMat& a);    // general family elements
  GMat word_matrix(const HWord& w);           // V-level product
  GMat word_minus_mu(const HWord& w);         // mu^{-1} (word)^{-1} mu
  std::optional<GMat> restrict_cva(const GMat& vmat) const;  // m x m or escape
  GMat rho(const GMat& vmat) const;           // throws when C_V(A) is not stable
  GVec kappa(const GMat& a) const;            // linearized class of a mod A_0
  std::optional<GVec> abar_of(const GMat& a) const;  // coordinates over the basis
  GMat section(const GVec& abar_coords);      // representative with given class
  GVec abar_act(const GVec& abar_coords, const std::vector<HWord>& expansion);
  std::vector<HWord> expansion_of(const GVec& r_coords) const;  // element of R
  GMat f_mat(const GMat& a, const GMat& b) const;  // v -> [v mu, a, b] on C_V(A)
  GVec phi(const GVec& v, const GMat& a);          // [v mu, a] - v h_a
  GMat star_of(const GVec& r_coords) const;        // involution, as a matrix
  GVec pi_abar(const GVec& abar_coords);           // J-reduced rho(h_b)

  // coordinates (r, abar, s) with w = v0 r + Phi(v0, abar) + v0 s mu
  struct Triple {
    GVec r, a, s;  // r, s are R-coordinates; a, Abar coordinates
  };
  GVec cva_lift(const GVec& coords) const;  // C_V(A) coordinates -> module vector
  GVec v0_times(const GVec& r_coords) const;
  GVec materialize(const Triple& t);
  std::optional<Triple> decompose(const GVec& w);

  QuatIdentification identify_quaternion() const;

  // sampled family elements (all of them когда finite)
  std::vector<GVec> sample_a_params(int count);
  std::vector<GVec> sample_b_params(int count);

 private:
  void stage_form_checks();
  bool stage_normal_form();
  bool stage_cubic();       // false: quadratic baseline handled, stop
  bool stage_spaces();      // false: zero part trivial, stop
  void stage_decompositions();
  bool stage_mu_rho();
  void stage_rings();
  void stage_f();
  void stage_module();
  void stage_involution();
  void stage_phi();
  void stage_xw();
  void stage_pi_abar();
  void stage_coordinatize();
  void stage_roots();
  void stage_info();

  la::Subspace phi_span(const la::Subspace& w_cva);
  Instance restrict_instance(const la::Subspace& x, const std::string& name) const;

  std::map<std::string, GMat> hcache_;
  std::optional<la::Subquotient> dom_sq_, cod_sq_;
  la::Subspace cod_w_;
  la::PreparedSolve cva_solver_;
  std::mt19937_64 rng_;
};

}  // namespace rank1
