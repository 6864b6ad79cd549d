#include "rank1/linalg.hpp"

#include <cassert>
#include <stdexcept>

namespace rank1 {

GMat GMat::identity(int n) {
  GMat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

GVec GMat::row(int i) const {
  GVec v(cols);
  for (int j = 0; j < cols; ++j) v[j] = at(i, j);
  return v;
}

void GMat::set_row(int i, const GVec& v) {
  assert(static_cast<int>(v.size()) == cols);
  for (int j = 0; j < cols; ++j) at(i, j) = v[j];
}

bool operator==(const GMat& x, const GMat& y) {
  return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
}

std::string vec_str(const GVec& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += rat_str(v[i]);
  }
  return s + ")";
}

std::string mat_str(const GMat& m) {
  std::string s = "[";
  for (int i = 0; i < m.rows; ++i) {
    if (i) s += "; ";
    for (int j = 0; j < m.cols; ++j) {
      if (j) s += ",";
      s += rat_str(m.at(i, j));
    }
  }
  return s + "]";
}

namespace la {

GVec vadd(const Ground& g, const GVec& x, const GVec& y) {
  assert(x.size() == y.size());
  GVec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = g.add(x[i], y[i]);
  return r;
}

GVec vsub(const Ground& g, const GVec& x, const GVec& y) {
  assert(x.size() == y.size());
  GVec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = g.sub(x[i], y[i]);
  return r;
}

GVec vscale(const Ground& g, const Rat& c, const GVec& x) {
  GVec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = g.mul(c, x[i]);
  return r;
}

bool vzero(const Ground& g, const GVec& x) {
  for (const auto& c : x)
    if (!g.is_zero(c)) return false;
  return true;
}

GVec zero_vec(int n) { return GVec(static_cast<size_t>(n), Rat(0)); }

GVec unit_vec(int n, int i) {
  GVec v = zero_vec(n);
  v[static_cast<size_t>(i)] = 1;
  return v;
}

GMat madd(const Ground& g, const GMat& x, const GMat& y) {
  assert(x.rows == y.rows && x.cols == y.cols);
  GMat r(x.rows, x.cols);
  for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = g.add(x.a[i], y.a[i]);
  return r;
}

GMat msub(const Ground& g, const GMat& x, const GMat& y) {
  assert(x.rows == y.rows && x.cols == y.cols);
  GMat r(x.rows, x.cols);
  for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = g.sub(x.a[i], y.a[i]);
  return r;
}

GMat mscale(const Ground& g, const Rat& c, const GMat& x) {
  GMat r(x.rows, x.cols);
  for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = g.mul(c, x.a[i]);
  return r;
}

GMat mmul(const Ground& g, const GMat& x, const GMat& y) {
  assert(x.cols == y.rows);
  GMat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const Rat& c = x.at(i, k);
      if (c == 0) continue;
      for (int j = 0; j < y.cols; ++j)
        r.at(i, j) = g.add(r.at(i, j), g.mul(c, y.at(k, j)));
    }
  return r;
}

GVec apply(const Ground& g, const GVec& v, const GMat& m) {
  assert(static_cast<int>(v.size()) == m.rows);
  GVec r = zero_vec(m.cols);
  for (int i = 0; i < m.rows; ++i) {
    if (v[i] == 0) continue;
    for (int j = 0; j < m.cols; ++j)
      r[j] = g.add(r[j], g.mul(v[i], m.at(i, j)));
  }
  return r;
}

GMat transpose(const GMat& m) {
  GMat r(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r.at(j, i) = m.at(i, j);
  return r;
}

bool mzero(const Ground& g, const GMat& m) {
  for (const auto& c : m.a)
    if (!g.is_zero(c)) return false;
  return true;
}

GMat mpow(const Ground& g, const GMat& m, long e) {
  assert(e >= 0 && m.rows == m.cols);
  GMat r = GMat::identity(m.rows);
  GMat base = m;
  while (e > 0) {
    if (e & 1) r = mmul(g, r, base);
    base = mmul(g, base, base);
    e >>= 1;
  }
  return r;
}

std::optional<GMat> minv(const Ground& g, const GMat& m) {
  if (m.rows != m.cols) return std::nullopt;
  int n = m.rows;
  GMat work = m, inv = GMat::identity(n);
  for (int col = 0, row = 0; col < n; ++col, ++row) {
    int piv = -1;
    for (int i = row; i < n; ++i)
      if (!g.is_zero(work.at(i, col))) {
        piv = i;
        break;
      }
    if (piv < 0) return std::nullopt;
    if (piv != row) {
      for (int j = 0; j < n; ++j) {
        std::swap(work.at(piv, j), work.at(row, j));
        std::swap(inv.at(piv, j), inv.at(row, j));
      }
    }
    Rat d = g.inv(work.at(row, col));
    for (int j = 0; j < n; ++j) {
      work.at(row, j) = g.mul(d, work.at(row, j));
      inv.at(row, j) = g.mul(d, inv.at(row, j));
    }
    for (int i = 0; i < n; ++i) {
      if (i == row) continue;
      Rat c = work.at(i, col);
      if (g.is_zero(c)) continue;
      for (int j = 0; j < n; ++j) {
        work.at(i, j) = g.sub(work.at(i, j), g.mul(c, work.at(row, j)));
        inv.at(i, j) = g.sub(inv.at(i, j), g.mul(c, inv.at(row, j)));
      }
    }
  }
  return inv;
}

Echelon rref(const Ground& g, int ambient, const std::vector<GVec>& vectors) {
  Echelon e;
  e.ambient = ambient;
  for (const GVec& raw : vectors) {
    assert(static_cast<int>(raw.size()) == ambient);
    GVec v(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) v[i] = g.canon(raw[i]);
    // eliminate existing pivots
    for (size_t r = 0; r < e.rows.size(); ++r) {
      const Rat& c = v[e.pivots[r]];
      if (!g.is_zero(c)) v = vsub(g, v, vscale(g, c, e.rows[r]));
    }
    int p = -1;
    for (int j = 0; j < ambient; ++j)
      if (!g.is_zero(v[j])) {
        p = j;
        break;
      }
    if (p < 0) continue;
    v = vscale(g, g.inv(v[p]), v);
    // back-eliminate the new pivot from existing rows
    for (size_t r = 0; r < e.rows.size(); ++r) {
      const Rat& c = e.rows[r][p];
      if (!g.is_zero(c)) e.rows[r] = vsub(g, e.rows[r], vscale(g, c, v));
    }
    // insert preserving pivot order
    size_t pos = 0;
    while (pos < e.pivots.size() && e.pivots[pos] < p) ++pos;
    e.rows.insert(e.rows.begin() + pos, v);
    e.pivots.insert(e.pivots.begin() + pos, p);
  }
  return e;
}

Subspace Subspace::full(const Ground& g, int ambient) {
  std::vector<GVec> rows;
  for (int i = 0; i < ambient; ++i) rows.push_back(unit_vec(ambient, i));
  return Subspace(g, ambient, rows);
}

GVec Subspace::reduce(const Ground& g, const GVec& v) const {
  assert(static_cast<int>(v.size()) == e_.ambient);
  GVec r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = g.canon(v[i]);
  for (size_t k = 0; k < e_.rows.size(); ++k) {
    const Rat& c = r[e_.pivots[k]];
    if (!g.is_zero(c)) r = vsub(g, r, vscale(g, c, e_.rows[k]));
  }
  return r;
}

bool Subspace::contains(const Ground& g, const Subspace& other) const {
  for (const auto& b : other.basis())
    if (!contains(g, b)) return false;
  return true;
}

GMat Subspace::residual_matrix(const Ground& g) const {
  int n = e_.ambient;
  GMat r = GMat::identity(n);
  // RREF rows have unit pivots and zeros in the other pivot columns, so a
  // single pass is exact.
  for (size_t k = 0; k < e_.rows.size(); ++k) {
    int p = e_.pivots[k];
    for (int j = 0; j < n; ++j)
      r.at(p, j) = g.sub(r.at(p, j), e_.rows[k][j]);
  }
  // rows of r: image of each unit vector under reduce
  (void)0;
  return r;
}

Subspace span(const Ground& g, int ambient, const std::vector<GVec>& gens) {
  return Subspace(g, ambient, gens);
}

Subspace sum(const Ground& g, const Subspace& u, const Subspace& w) {
  assert(u.ambient() == w.ambient());
  std::vector<GVec> gens = u.basis();
  for (const auto& b : w.basis()) gens.push_back(b);
  return Subspace(g, u.ambient(), gens);
}

Subspace intersect(const Ground& g, const Subspace& u, const Subspace& w) {
  assert(u.ambient() == w.ambient());
  if (u.dim() == 0 || w.dim() == 0) return Subspace::zero(u.ambient());
  // x = c * B_u must reduce to zero against w
  GMat bu(u.dim(), u.ambient());
  for (int i = 0; i < u.dim(); ++i) bu.set_row(i, u.basis()[i]);
  GMat m = mmul(g, bu, w.residual_matrix(g));
  Subspace coeff = left_kernel(g, m);
  std::vector<GVec> gens;
  for (const auto& c : coeff.basis()) gens.push_back(apply(g, c, bu));
  return Subspace(g, u.ambient(), gens);
}

Subspace left_kernel(const Ground& g, const GMat& m) {
  // Solve v * m = 0 by RREF on the transpose-augmented system.
  // Row-reduce [m | I]; rows whose m-part vanished span the kernel.
  int n = m.rows, c = m.cols;
  std::vector<GVec> rows;
  for (int i = 0; i < n; ++i) {
    GVec v(static_cast<size_t>(c + n), Rat(0));
    for (int j = 0; j < c; ++j) v[j] = m.at(i, j);
    v[static_cast<size_t>(c + i)] = 1;
    rows.push_back(std::move(v));
  }
  Echelon e = rref(g, c + n, rows);
  std::vector<GVec> kgens;
  for (size_t r = 0; r < e.rows.size(); ++r) {
    if (e.pivots[r] < c) continue;  // m-part nonzero
    GVec v(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) v[j] = e.rows[r][static_cast<size_t>(c + j)];
    kgens.push_back(std::move(v));
  }
  return Subspace(g, n, kgens);
}

Subspace preimage(const Ground& g, const GMat& m, const Subspace& u) {
  return left_kernel(g, mmul(g, m, u.residual_matrix(g)));
}

Subspace image(const Ground& g, const Subspace& u, const GMat& m) {
  std::vector<GVec> gens;
  for (const auto& b : u.basis()) gens.push_back(apply(g, b, m));
  return Subspace(g, m.cols, gens);
}

std::optional<AffineSolution> solve_right(const Ground& g, const GMat& m, const GVec& w) {
  assert(static_cast<int>(w.size()) == m.cols);
  int n = m.rows, c = m.cols;
  // Row-reduce [m | I]; then express w over the reduced m-parts.
  std::vector<GVec> rows;
  for (int i = 0; i < n; ++i) {
    GVec v(static_cast<size_t>(c + n), Rat(0));
    for (int j = 0; j < c; ++j) v[j] = m.at(i, j);
    v[static_cast<size_t>(c + i)] = 1;
    rows.push_back(std::move(v));
  }
  Echelon e = rref(g, c + n, rows);
  GVec part = zero_vec(n);
  GVec rem(w.size());
  for (size_t i = 0; i < w.size(); ++i) rem[i] = g.canon(w[i]);
  std::vector<GVec> kgens;
  for (size_t r = 0; r < e.rows.size(); ++r) {
    if (e.pivots[r] >= c) {
      GVec v(static_cast<size_t>(n));
      for (int j = 0; j < n; ++j) v[j] = e.rows[r][static_cast<size_t>(c + j)];
      kgens.push_back(std::move(v));
      continue;
    }
    Rat coef = rem[e.pivots[r]];
    if (g.is_zero(coef)) continue;
    for (int j = 0; j < c; ++j)
      rem[j] = g.sub(rem[j], g.mul(coef, e.rows[r][j]));
    for (int j = 0; j < n; ++j)
      part[j] = g.add(part[j], g.mul(coef, e.rows[r][static_cast<size_t>(c + j)]));
  }
  if (!vzero(g, rem)) return std::nullopt;
  return AffineSolution{part, Subspace(g, n, kgens)};
}

std::optional<GVec> coords_in(const Ground& g, const std::vector<GVec>& rows, const GVec& v) {
  if (rows.empty()) return vzero(g, v) ? std::optional<GVec>(GVec{}) : std::nullopt;
  GMat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i) m.set_row(static_cast<int>(i), rows[i]);
  auto sol = solve_right(g, m, v);
  if (!sol) return std::nullopt;
  return sol->particular;
}

PreparedSolve::PreparedSolve(const Ground& g, const std::vector<GVec>& rows) {
  n_ = static_cast<int>(rows.size());
  c_ = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  std::vector<GVec> aug;
  for (int i = 0; i < n_; ++i) {
    GVec v(static_cast<size_t>(c_ + n_), Rat(0));
    for (int j = 0; j < c_; ++j) v[static_cast<size_t>(j)] = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    v[static_cast<size_t>(c_ + i)] = 1;
    aug.push_back(std::move(v));
  }
  e_ = rref(g, c_ + n_, aug);
}

std::optional<GVec> PreparedSolve::coords(const Ground& g, const GVec& w) const {
  assert(static_cast<int>(w.size()) == c_);
  GVec part = zero_vec(n_);
  GVec rem(w.size());
  for (size_t i = 0; i < w.size(); ++i) rem[i] = g.canon(w[i]);
  for (size_t r = 0; r < e_.rows.size(); ++r) {
    if (e_.pivots[r] >= c_) continue;
    Rat coef = rem[e_.pivots[r]];
    if (g.is_zero(coef)) continue;
    for (int j = 0; j < c_; ++j)
      rem[j] = g.sub(rem[j], g.mul(coef, e_.rows[r][static_cast<size_t>(j)]));
    for (int j = 0; j < n_; ++j)
      part[j] = g.add(part[j], g.mul(coef, e_.rows[r][static_cast<size_t>(c_ + j)]));
  }
  if (!vzero(g, rem)) return std::nullopt;
  return part;
}

std::vector<GVec> complement_basis(const Ground& g, const Subspace& w, const Subspace& z) {
  std::vector<GVec> out;
  Subspace acc = z;
  for (const auto& b : w.basis()) {
    GVec r = acc.reduce(g, b);
    if (!vzero(g, r)) {
      out.push_back(r);
      std::vector<GVec> gens = acc.basis();
      gens.push_back(r);
      acc = Subspace(g, w.ambient(), gens);
    }
  }
  return out;
}

Subquotient::Subquotient(const Ground& g, const Subspace& w, const Subspace& z)
    : w_(w), z_(z), cbasis_(complement_basis(g, w, z)) {
  std::vector<GVec> rows = z_.basis();
  for (const auto& c : cbasis_) rows.push_back(c);
  solver_ = PreparedSolve(g, rows);
}

GVec Subquotient::project(const Ground& g, const GVec& v) const {
  auto coords = solver_.coords(g, v);
  if (!coords) throw std::domain_error("vector not in the subspace of a subquotient");
  GVec out(cbasis_.size());
  size_t off = z_.basis().size();
  for (size_t i = 0; i < cbasis_.size(); ++i) out[i] = (*coords)[off + i];
  return out;
}

GVec Subquotient::lift(const Ground& g, const GVec& coords) const {
  assert(coords.size() == cbasis_.size());
  GVec v = zero_vec(w_.ambient());
  for (size_t i = 0; i < cbasis_.size(); ++i)
    v = vadd(g, v, vscale(g, coords[i], cbasis_[i]));
  return v;
}

GMat Subquotient::induced(const Ground& g, const GMat& ambient_map) const {
  GMat m(dim(), dim());
  for (int i = 0; i < dim(); ++i) {
    GVec img = apply(g, cbasis_[static_cast<size_t>(i)], ambient_map);
    m.set_row(i, project(g, img));
  }
  return m;
}

}  // namespace la
}  // namespace rank1
