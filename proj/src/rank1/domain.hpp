#pragma once

#include "rank1/linalg.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace rank1 {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DomainKind { finite_field, rationals, quaternion, endo_subring };

class ScalarDomain;

// A domain element: coordinate vector over the prime field (finite case) or
// over Q, relative to the domain's distinguished basis.
struct Scalar {
  const ScalarDomain* dom = nullptr;
  GVec c;
};

bool operator==(const Scalar& x, const Scalar& y);
inline bool operator!=(const Scalar& x, const Scalar& y) { return !(x == y); }

// Exact arithmetic for a finite-dimensional associative algebra with 1 over
// its ground field, given by structure constants. Covers F_{p^k}, Q,
// quaternion algebras over Q, and subrings of a matrix algebra discovered at
// run time.
class ScalarDomain {
 public:
  static std::shared_ptr<const ScalarDomain> rationals();
  // modulus: monic polynomial coefficients c0..ck (c_k = 1) over F_p.
  static std::shared_ptr<const ScalarDomain> finite_field(std::int64_t p, int k,
                                                          const std::vector<Rat>& modulus);
  static std::shared_ptr<const ScalarDomain> quaternion(const Rat& a, const Rat& b);
  // basis: independent m x m matrices over `ground` spanning a unital subring.
  static std::shared_ptr<const ScalarDomain> endo_subring(const Ground& ground,
                                                          const std::vector<GMat>& basis,
                                                          const std::string& name);

  DomainKind kind() const { return kind_; }
  const Ground& ground() const { return ground_; }
  std::int64_t characteristic() const { return ground_.p; }
  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  // Number of elements; 0 when infinite.
  std::int64_t order() const;

  Scalar zero() const { return {this, la::zero_vec(dim_)}; }
  Scalar one() const { return {this, one_}; }
  Scalar basis_elem(int i) const { return {this, la::unit_vec(dim_, i)}; }
  Scalar from_coords(const GVec& c) const;
  Scalar from_int(long n) const;

  Scalar add(const Scalar& x, const Scalar& y) const;
  Scalar sub(const Scalar& x, const Scalar& y) const;
  Scalar neg(const Scalar& x) const;
  Scalar mul(const Scalar& x, const Scalar& y) const;
  Scalar mul_ground(const Rat& c, const Scalar& x) const;
  bool is_zero(const Scalar& x) const { return la::vzero(ground_, x.c); }
  bool is_one(const Scalar& x) const { return x.c == one_; }
  std::optional<Scalar> inverse(const Scalar& x) const;  // two-sided, exact
  Scalar pow(const Scalar& x, long e) const;             // e >= 0

  // Ground matrices of y -> x*y and y -> y*x on coordinates.
  GMat left_mult_matrix(const Scalar& x) const;
  GMat right_mult_matrix(const Scalar& x) const;

  // Quaternion helpers (standard involution and norm).
  Scalar quat_conj(const Scalar& x) const;
  Rat quat_norm(const Scalar& x) const;

  std::vector<Scalar> all_elements() const;  // finite domains only
  std::string str(const Scalar& x) const;

  // finite field data
  std::int64_t ff_p() const { return ground_.p; }
  int ff_k() const { return dim_; }
  const std::vector<Rat>& ff_modulus() const { return modulus_; }
  // quaternion data
  const Rat& quat_a() const { return qa_; }
  const Rat& quat_b() const { return qb_; }
  // endo_subring data
  const std::vector<GMat>& subring_basis() const { return sub_basis_; }

 private:
  ScalarDomain() = default;
  void init_table_checks() const;  // associativity spot checks; throws

  DomainKind kind_ = DomainKind::rationals;
  Ground ground_;
  int dim_ = 1;
  std::string name_;
  std::vector<std::vector<GVec>> table_;  // table_[i][j] = coords of b_i * b_j
  GVec one_;
  std::vector<Rat> modulus_;
  Rat qa_, qb_;
  std::vector<GMat> sub_basis_;
};

// An involution (involutory anti-automorphism), stored as the ground-linear
// matrix of its action on coordinates.
class InvolutionSpec {
 public:
  enum class Kind { identity, frobenius, quat_standard, quat_twisted, linear };

  static InvolutionSpec identity(const ScalarDomain& d);
  static InvolutionSpec frobenius(const ScalarDomain& d, std::int64_t q);
  static InvolutionSpec quat_standard(const ScalarDomain& d);
  static InvolutionSpec quat_twisted(const ScalarDomain& d, const Scalar& u);
  static InvolutionSpec linear(const ScalarDomain& d, const GMat& m, const std::string& name);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const GMat& matrix() const { return mat_; }
  Scalar apply(const Scalar& x) const;
  bool is_identity_map(const ScalarDomain& d) const;

  // Checks: involutory on the basis, additive by construction,
  // anti-multiplicative on all basis pairs. Throws DomainError on failure.
  void validate(const ScalarDomain& d) const;

 private:
  Kind kind_ = Kind::identity;
  std::string name_;
  GMat mat_;
};

// Basis of H(K,*) = {x : x* = x} over the ground field.
std::vector<Scalar> fixed_set_basis(const ScalarDomain& d, const InvolutionSpec& inv);

}  // namespace rank1
