#pragma once

#include "rank1/ground.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rank1 {

using GVec = std::vector<Rat>;

struct GMat {
  int rows = 0;
  int cols = 0;
  std::vector<Rat> a;  // row-major

  GMat() = default;
  GMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, Rat(0)) {}

  Rat& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const Rat& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static GMat identity(int n);
  static GMat zero(int n) { return GMat(n, n); }

  GVec row(int i) const;
  void set_row(int i, const GVec& v);
};

bool operator==(const GMat& x, const GMat& y);
inline bool operator!=(const GMat& x, const GMat& y) { return !(x == y); }

std::string vec_str(const GVec& v);
std::string mat_str(const GMat& m);  // row-major, rows separated by ';'

namespace la {

GVec vadd(const Ground& g, const GVec& x, const GVec& y);
GVec vsub(const Ground& g, const GVec& x, const GVec& y);
GVec vscale(const Ground& g, const Rat& c, const GVec& x);
bool vzero(const Ground& g, const GVec& x);
GVec zero_vec(int n);
GVec unit_vec(int n, int i);

GMat madd(const Ground& g, const GMat& x, const GMat& y);
GMat msub(const Ground& g, const GMat& x, const GMat& y);
GMat mscale(const Ground& g, const Rat& c, const GMat& x);
// Standard product: (xy)_{ik} = sum_j x_{ij} y_{jk}. Row vectors act as
// v * m, so "apply x then y" is the product x*y.
GMat mmul(const Ground& g, const GMat& x, const GMat& y);
GVec apply(const Ground& g, const GVec& v, const GMat& m);  // v * m
GMat transpose(const GMat& m);
bool mzero(const Ground& g, const GMat& m);
GMat mpow(const Ground& g, const GMat& m, long e);  // e >= 0

// Gauss-Jordan inverse; nullopt when singular.
std::optional<GMat> minv(const Ground& g, const GMat& m);

// Reduced row echelon form of the given row list; zero rows dropped.
// pivots[i] = pivot column of row i, strictly increasing.
struct Echelon {
  int ambient = 0;
  std::vector<GVec> rows;
  std::vector<int> pivots;
  int dim() const { return static_cast<int>(rows.size()); }
};

Echelon rref(const Ground& g, int ambient, const std::vector<GVec>& vectors);

// A subspace of ground^n held as a canonical RREF basis.
class Subspace {
 public:
  Subspace() = default;
  Subspace(const Ground& g, int ambient, const std::vector<GVec>& gens)
      : e_(rref(g, ambient, gens)) {}

  static Subspace zero(int ambient) {
    Subspace s;
    s.e_.ambient = ambient;
    return s;
  }
  static Subspace full(const Ground& g, int ambient);

  int ambient() const { return e_.ambient; }
  int dim() const { return e_.dim(); }
  const std::vector<GVec>& basis() const { return e_.rows; }
  const std::vector<int>& pivots() const { return e_.pivots; }

  // Residual of v after eliminating this subspace's pivots; canonical coset
  // representative of v + W.
  GVec reduce(const Ground& g, const GVec& v) const;
  bool contains(const Ground& g, const GVec& v) const { return vzero(g, reduce(g, v)); }
  bool contains(const Ground& g, const Subspace& other) const;

  bool operator==(const Subspace& o) const {
    return e_.ambient == o.e_.ambient && e_.rows == o.e_.rows;
  }
  bool operator!=(const Subspace& o) const { return !(*this == o); }

  // n x n matrix of v -> reduce(v).
  GMat residual_matrix(const Ground& g) const;

 private:
  Echelon e_;
};

Subspace span(const Ground& g, int ambient, const std::vector<GVec>& gens);
Subspace sum(const Ground& g, const Subspace& u, const Subspace& w);
Subspace intersect(const Ground& g, const Subspace& u, const Subspace& w);

// {v : v * m = 0}; v has dimension m.rows.
Subspace left_kernel(const Ground& g, const GMat& m);
// {v : v * m in u}.
Subspace preimage(const Ground& g, const GMat& m, const Subspace& u);
// span{ b * m : b basis of u }.
Subspace image(const Ground& g, const Subspace& u, const GMat& m);

// One solution of v * m = w together with the homogeneous kernel, or
// nullopt when inconsistent.
struct AffineSolution {
  GVec particular;
  Subspace kernel;
};
std::optional<AffineSolution> solve_right(const Ground& g, const GMat& m, const GVec& w);

// Coordinates of v in the given (independent) rows, if v lies in their span.
std::optional<GVec> coords_in(const Ground& g, const std::vector<GVec>& rows, const GVec& v);

// Factors the system x * rows = w once so repeated solves are cheap.
class PreparedSolve {
 public:
  PreparedSolve() = default;
  PreparedSolve(const Ground& g, const std::vector<GVec>& rows);
  std::optional<GVec> coords(const Ground& g, const GVec& w) const;
  bool ready() const { return c_ > 0 || n_ > 0; }

 private:
  int n_ = 0;  // number of rows / unknowns
  int c_ = 0;  // row length
  Echelon e_;
};

// Basis of a complement of z inside w (z must be contained in w).
std::vector<GVec> complement_basis(const Ground& g, const Subspace& w, const Subspace& z);

// The module w/z with an explicit basis; maps ambient matrices that stabilize
// both w and z to induced matrices on the quotient basis.
class Subquotient {
 public:
  Subquotient(const Ground& g, const Subspace& w, const Subspace& z);

  int dim() const { return static_cast<int>(cbasis_.size()); }
  const std::vector<GVec>& lifted_basis() const { return cbasis_; }

  // coordinates of (v + z) over the quotient basis; v must lie in w.
  GVec project(const Ground& g, const GVec& v) const;
  GVec lift(const Ground& g, const GVec& coords) const;
  GMat induced(const Ground& g, const GMat& ambient_map) const;

 private:
  Subspace w_, z_;
  std::vector<GVec> cbasis_;
  PreparedSolve solver_;
};

}  // namespace la
}  // namespace rank1
