#pragma once

#include "rank1/formspace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rank1 {

// Exact subspace calculus for the action of a generated group on the module.
la::Subspace fixed_space(const Ground& g, int vdim, const std::vector<GMat>& gens);
// span{ w (g-1) } closed under the maps (g-1); equals [W, <gens>] for
// unipotent generator families acting cubically
la::Subspace commutator_space(const Ground& g, const la::Subspace& w,
                              const std::vector<GMat>& gens);
// smallest subspace containing u and stable under gens and their inverses
la::Subspace invariant_closure(const Ground& g, const la::Subspace& u,
                               const std::vector<GMat>& gens);
// {v : v(g-1) in u for all gens}
la::Subspace centralizer_quotient(const Ground& g, int vdim, const std::vector<GMat>& gens,
                                  const la::Subspace& u);

// g^q for unipotent g (with (g-1)^3 = 0); q integral when the ground field is
// modular, arbitrary rational over Q
GMat unipotent_qpower(const Ground& g, const GMat& m, const Rat& q);

struct CubicVerdict {
  enum Kind { quadratic, cubic, not_cubic } kind = not_cubic;
  int vaa_dim = 0;   // dim [V,A,A]
  int vggg_dim = 0;  // dim [V,G,G,G]
  std::string witness;  // word certifying [V,G,G,G] != 0 in the cubic case
};

// Solver state for one instance: caches the fixed and commutator spaces of
// both families and answers b(a) queries.
class RankOneCtx {
 public:
  explicit RankOneCtx(const Instance& inst);

  const Instance& inst() const { return *inst_; }
  const Ground& ground() const { return g_; }
  const std::vector<GMat>& agens() const { return agens_; }
  const std::vector<GMat>& bgens() const { return bgens_; }
  const la::Subspace& cva() const { return cva_; }
  const la::Subspace& cvb() const { return cvb_; }
  const la::Subspace& va() const { return va_; }
  const la::Subspace& vb() const { return vb_; }
  la::Subspace cvg() const;  // C_V(<A,B>)
  la::Subspace vg() const;   // [V, <A,B>]

  CubicVerdict cubic_verify() const;

  bool in_family(const RootFamily& f, const GMat& m) const { return f.param_of(m).has_value(); }

  struct FindResult {
    GVec param;
    GMat mat;
  };
  // the unique b in B with C_V(A) b = C_V(B) a, conjugation-verified;
  // on failure *err explains (identity input, no solution, not unique,
  // conjugation check failed)
  std::optional<FindResult> find_b(const GMat& a, std::string* err = nullptr) const;
  std::optional<FindResult> find_a(const GMat& b, std::string* err = nullptr) const;

  // mu_a = b(a^{-1}) a b(a)^{-1}; verified to swap the two families
  std::optional<GMat> mu_of(const GMat& a, std::string* err = nullptr) const;

  // parameters z with V N(z) inside C_V(A) and [V,A] N(z) = 0; the returned
  // basis is post-verified on the actual family elements and cross-checked by
  // enumeration when the family is finite
  struct A0Result {
    la::Subspace params;  // subspace of the A-parameter space
    bool post_verified = false;
    bool enum_checked = false;
    std::string note;
  };
  A0Result a0_compute() const;
  A0Result b0_compute() const;

 private:
  std::optional<FindResult> solve_point(const RootFamily& fam, const la::Subspace& from,
                                        const la::Subspace& target, std::string* err) const;
  bool conjugation_ok(const GMat& a, const GMat& b, std::string* err) const;
  A0Result zero_part(const RootFamily& fam, const la::Subspace& cv_own,
                     const la::Subspace& comm_own) const;

  const Instance* inst_;
  Ground g_;
  std::vector<GMat> agens_, bgens_;
  la::Subspace cva_, cvb_, va_, vb_;
};

}  // namespace rank1
