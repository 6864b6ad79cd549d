#pragma once

#include "rank1/jordan.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rank1 {

// K-coordinate view of the module V = K^kdim; ground coordinates are laid out
// slot-major: ground index of (slot i, K-basis l) is i*K.dim() + l.
struct KView {
  std::shared_ptr<const ScalarDomain> K;
  int kdim = 0;

  int vdim() const { return kdim * K->dim(); }
  GVec flatten(const std::vector<Scalar>& kv) const;
  std::vector<Scalar> unflatten(const GVec& v) const;
  // ground matrix of v -> v * lambda (right scalar action)
  GMat right_scalar(const Scalar& lambda) const;
  // ground matrix of the K-linear map out[o] = sum_i coef[o][i] * in[i]
  // (coefficients multiply input coordinates from the left)
  GMat left_coef_map(const std::vector<std::vector<Scalar>>& coef) const;
  // ground matrix of out[o] = sum_i in[i] * coef[i][o]
  GMat right_coef_map(const std::vector<std::vector<Scalar>>& coef) const;
};

// A parametrized family of unipotent module automorphisms.
struct RootFamily {
  char side = 'A';
  int pdim = 0;
  int vdim = 0;
  // Linear part of elem at 0: for linear families elem(z) = I + sum z_l N_l
  // exactly; otherwise the quadratic correction maps into the fixed space.
  std::vector<GMat> nmats;
  bool linear = true;
  std::function<GMat(const GVec&)> elem;
  std::function<bool(const GVec&)> admissible;
  std::function<std::optional<GVec>(const GMat&)> param_of;
  std::vector<GVec> generators;  // admissible params whose span is param_span
  la::Subspace param_span;
  std::optional<std::vector<GVec>> all_params;
  std::function<std::string(const GVec&)> describe;
  // draws an admissible parameter; used for sampled checks over infinite
  // families
  std::function<GVec(std::mt19937_64&)> sampler;

  GMat nlin(const Ground& g, const GVec& z) const;  // sum z_l N_l
  std::optional<std::vector<GMat>> enumerate_nontrivial(const Ground& g) const;
};

// Fills elem / param_of / admissible-wrapping for a family whose matrix is
// exactly I + sum z_l N_l.
void finish_linear_family(const Ground& g, RootFamily& f,
                          std::function<bool(const GVec&)> admissible);

struct ExtendedSpace;
struct OrthSpace;

struct Instance {
  std::string name;
  std::string kind;  // pseudoquadratic | orthogonal | sl2jr | doubled
  Ground gr;
  int vdim = 0;
  RootFamily A, B;
  std::optional<KView> kview;

  // closed forms carried by the constructors, used as oracles by the driver
  std::optional<la::Subspace> expected_cva, expected_cvb, expected_va, expected_vb;
  std::optional<la::Subspace> expected_a0_params;
  std::int64_t expected_A_order = -1;

  std::shared_ptr<const ExtendedSpace> ext;  // pseudoquadratic instances
  std::shared_ptr<const OrthSpace> orth;     // orthogonal instances
  std::shared_ptr<const Instance> base;      // doubled instances
  std::shared_ptr<const ScalarDomain> keep_alive;
};

// An anisotropic pseudo-quadratic space (K, K0, *, Vbar, pibar, f).
struct PseudoQuadraticSpace {
  InvolutorySet iset;
  int vbar_dim = 0;
  std::vector<Scalar> pibar;                // representatives pibar(e_i)
  std::vector<std::vector<Scalar>> gram;    // f(e_i, e_j)

  PseudoQuadraticSpace(InvolutorySet is, std::vector<Scalar> pib,
                       std::vector<std::vector<Scalar>> gr);

  const ScalarDomain& dom() const { return *iset.dom; }
  // canonical representative of pibar(v) mod K0, fixed left-to-right fold
  Scalar pq_eval(const std::vector<Scalar>& v) const;
  Scalar pq_eval_rtl(const std::vector<Scalar>& v) const;  // opposite fold order
  Scalar f_eval(const std::vector<Scalar>& x, const std::vector<Scalar>& y) const;
  la::Subspace rad_f() const;  // ground subspace of Vbar coordinates
};

struct AnisotropyResult {
  bool anisotropic = false;
  CheckMode mode = CheckMode::exhaustive;
  int samples = 0;
  std::string detail;
  std::optional<std::vector<Scalar>> witness;
};

AnisotropyResult pq_is_anisotropic(const PseudoQuadraticSpace& s, int samples = 50,
                                   unsigned long seed = 1);

// V = K + Vbar + K with pi(r,x,s) = s* r + pibar(x) mod K0.
struct ExtendedSpace {
  PseudoQuadraticSpace base;
  AnisotropyResult aniso;

  explicit ExtendedSpace(PseudoQuadraticSpace b);

  int n() const { return base.vbar_dim + 2; }  // K-dimension of V
  KView view() const;
  Scalar pi_eval(const std::vector<Scalar>& v) const;
  Scalar g_eval(const std::vector<Scalar>& z, const std::vector<Scalar>& w) const;
  // transvection matrices; throw unless pibar(v) - t lies in K0
  GMat alpha(const std::vector<Scalar>& v, const Scalar& t) const;
  GMat beta(const Scalar& t, const std::vector<Scalar>& v) const;
  std::vector<std::vector<Scalar>> alpha_coef(const std::vector<Scalar>& v,
                                              const Scalar& t) const;
  std::vector<std::vector<Scalar>> beta_coef(const Scalar& t,
                                             const std::vector<Scalar>& v) const;

  // all 1-dimensional K-subspaces, as canonical last-nonzero-normalized
  // representatives (finite K only)
  std::vector<std::vector<Scalar>> all_lines() const;
  bool line_isotropic(const std::vector<Scalar>& rep) const;
};

// throws DomainError when the space is not certified anisotropic
std::shared_ptr<const ExtendedSpace> extend_witt1(PseudoQuadraticSpace s,
                                                  int samples = 50, unsigned long seed = 1);

Instance make_pq_instance(std::shared_ptr<const ExtendedSpace> ext, const std::string& name,
                          int samples = 40, unsigned long seed = 1);

// A quadratic space (L0, q) over a commutative field, with its polar form.
struct QuadraticSpace {
  std::shared_ptr<const ScalarDomain> K;
  int l0_dim = 0;
  std::vector<Scalar> qvals;                // q(e_i)
  std::vector<std::vector<Scalar>> polar;   // f(e_i, e_j)

  QuadraticSpace(std::shared_ptr<const ScalarDomain> k, std::vector<Scalar> q,
                 std::vector<std::vector<Scalar>> f);
  Scalar q_eval(const std::vector<Scalar>& v) const;
  Scalar f_eval(const std::vector<Scalar>& x, const std::vector<Scalar>& y) const;
  la::Subspace radical() const;  // rad of the polar form = defect space
};

struct OrthSpace {
  QuadraticSpace base;       // normalized so that q(e) = 1 for some defect e
  la::Subspace defect;       // inside L0 ground coordinates
  std::vector<GVec> lbar_basis;  // complement of the defect in L0
  InvolutorySet iset;        // (K, q(Def), id)
  bool form_into_quotient = false;  // true when Def != 0: Q maps to K/K0

  int n() const { return static_cast<int>(lbar_basis.size()) + 2; }
  KView view() const;
  // Q(x, wbar, y) = x y + q(w) (+ K0 when defective); returns the canonical
  // representative mod K0 in the quotient case
  Scalar q_extended(const std::vector<Scalar>& v) const;
  GMat alpha(const GVec& l0_param) const;
  GMat beta(const GVec& l0_param) const;
  GVec project_l0(const GVec& l0_vec) const;      // L0 -> Lbar coordinates
  std::optional<GVec> lift_lbar(const GVec& lbar, const Scalar& qval) const;
};

// Preconditions: polar consistency; when Def = 0 the form must be anisotropic
// (enumerated); when Def != 0 (char 2) q must be injective on the defect and
// admit a unit value there after normalization, and the induced polar form on
// L0/Def must be nondegenerate.
std::shared_ptr<const OrthSpace> orth_build(QuadraticSpace q);

Instance make_orth_instance(std::shared_ptr<const OrthSpace> orth, const std::string& name);

// V = R^2 over the ambient matrix ring of J, with lower/upper unipotent
// families parametrized by J.
Instance sl2jr_build(const JordanSubspace& j, const std::string& name);

Instance double_instance(const Instance& inst, const std::string& name);

// Construction-level verifications for the scenario driver.
struct FormCheck {
  std::string id;
  bool pass = false;
  CheckMode mode = CheckMode::exhaustive;
  int samples = 0;
  std::string detail;
};

std::vector<FormCheck> run_form_checks(const Instance& inst, int samples, unsigned long seed);

}  // namespace rank1
