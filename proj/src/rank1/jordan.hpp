#pragma once

#include "rank1/domain.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rank1 {

// n x n matrices over a ScalarDomain, with the ring product (entries keep
// their order, so this works over noncommutative domains too).
struct KMat {
  const ScalarDomain* dom = nullptr;
  int n = 0;
  std::vector<Scalar> a;  // row-major

  Scalar& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const Scalar& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

struct MatrixRing {
  std::shared_ptr<const ScalarDomain> dom;
  int n = 1;

  KMat zero() const;
  KMat identity() const;
  KMat from_scalar(const Scalar& s) const;  // s * I
  int flat_dim() const { return n * n * dom->dim(); }
};

KMat km_add(const KMat& x, const KMat& y);
KMat km_sub(const KMat& x, const KMat& y);
KMat km_neg(const KMat& x);
KMat km_mul(const KMat& x, const KMat& y);
bool km_eq(const KMat& x, const KMat& y);
bool km_is_zero(const KMat& x);
std::optional<KMat> km_inverse(const KMat& x);  // Gauss-Jordan, division-ring entries
GVec km_flat(const KMat& x);
KMat km_unflat(const MatrixRing& ring, const GVec& v);
std::string km_str(const KMat& x);

// Q_a(b) = a b a, and its bilinearization.
KMat q_operator(const KMat& a, const KMat& b);
KMat q_cross(const KMat& a, const KMat& b, const KMat& c);  // Q_{a,b}(c)

enum class CheckMode { exhaustive, sampled, certificate };

struct JordanWitness {
  KMat a, b, value;
  std::string note;
};

// An additive subspace of a matrix ring with a stored ground-field basis.
class JordanSubspace {
 public:
  JordanSubspace(MatrixRing ring, std::vector<KMat> basis);

  const MatrixRing& ring() const { return ring_; }
  const std::vector<KMat>& basis() const { return basis_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  bool contains_identity() const { return contains_identity_; }
  bool contains(const KMat& m) const;
  const la::Subspace& flat() const { return flat_; }

  // All elements (finite ground field only, guarded by size).
  std::vector<KMat> all_elements(std::int64_t cap = 4096) const;

 private:
  MatrixRing ring_;
  std::vector<KMat> basis_;
  la::Subspace flat_;
  bool contains_identity_ = false;
};

struct ClosureResult {
  bool ok = false;
  std::optional<JordanWitness> witness;
};

// J Q_a subset of J for all a in J, reduced to basis checks of Q_a and Q_{a,b}.
ClosureResult is_jordan_closed(const JordanSubspace& j);

struct DivisionResult {
  bool ok = false;
  CheckMode mode = CheckMode::exhaustive;
  int samples = 0;
  std::optional<JordanWitness> witness;
  std::string certificate;
};

DivisionResult is_division_jordan(const JordanSubspace& j, int samples = 24,
                                  unsigned long seed = 1);

ClosureResult hua_closure_check(const JordanSubspace& j);

struct CommClassification {
  bool commutative = false;
  bool q_agrees = false;  // the Q-operator commutation test reaches the same verdict
  std::optional<JordanWitness> witness;
};

CommClassification classify_commutative(const JordanSubspace& j);

// (K, K0, *) with K0 an additive subgroup of fixed elements.
struct InvolutorySet {
  std::shared_ptr<const ScalarDomain> dom;
  InvolutionSpec inv;
  std::vector<Scalar> k0_basis;
  la::Subspace k0;

  InvolutorySet(std::shared_ptr<const ScalarDomain> d, InvolutionSpec i,
                std::vector<Scalar> basis);
  bool k0_contains(const Scalar& x) const;
  Scalar k0_reduce(const Scalar& x) const;  // canonical coset representative mod K0
};

struct AmpleResult {
  bool ok = false;
  CheckMode mode = CheckMode::exhaustive;
  int samples = 0;
  std::string witness;
};

// 1 in K0, K0 subset of H(K,*), x* K0 x subset of K0, traces x + x* in K0.
AmpleResult is_ample(const InvolutorySet& s, int samples = 24, unsigned long seed = 1);

// A unital subring of a matrix ring with a stored ground basis.
struct SubRing {
  MatrixRing ring;
  std::vector<KMat> basis;
  la::Subspace flat;

  SubRing(MatrixRing r, std::vector<KMat> b, bool verify_closed = true);
  bool contains(const KMat& m) const { return flat.contains(ring.dom->ground(), km_flat(m)); }
};

enum class IdealLemmaBranch { hypothesis_fails, inverse_in_subring, proper_ideal };

struct IdealLemmaResult {
  IdealLemmaBranch branch = IdealLemmaBranch::hypothesis_fails;
  std::string detail;
  int ideal_dim = -1;  // for the proper_ideal branch
};

// Dichotomy for a unit x with x+1 a unit and x, x+1 normalizing R:
// either (x+1)^{-1} lies in R, or I = R cap (x+1)R is a proper two-sided
// ideal of R containing x^{-1} u x - u for all u in R.
IdealLemmaResult ideal_lemma_check(const SubRing& r, const KMat& x);

}  // namespace rank1
