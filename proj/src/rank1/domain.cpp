#include "rank1/domain.hpp"

#include <cassert>

namespace rank1 {

bool operator==(const Scalar& x, const Scalar& y) {
  assert(x.dom == y.dom);
  return x.dom->ground().p == 0
             ? x.c == y.c
             : [&] {
                 for (size_t i = 0; i < x.c.size(); ++i)
                   if (!x.dom->ground().eq(x.c[i], y.c[i])) return false;
                 return true;
               }();
}

namespace {

// polynomial helpers over F_p, coefficients low-to-high
using Poly = std::vector<Rat>;

Poly poly_trim(const Ground& g, Poly a) {
  while (!a.empty() && g.is_zero(a.back())) a.pop_back();
  return a;
}

Poly poly_mod(const Ground& g, Poly a, const Poly& m) {
  a = poly_trim(g, std::move(a));
  Poly mm = poly_trim(g, m);
  int dm = static_cast<int>(mm.size()) - 1;
  while (static_cast<int>(a.size()) - 1 >= dm) {
    int da = static_cast<int>(a.size()) - 1;
    Rat c = g.div(a.back(), mm.back());
    for (int i = 0; i <= dm; ++i)
      a[da - dm + i] = g.sub(a[da - dm + i], g.mul(c, mm[i]));
    a = poly_trim(g, std::move(a));
  }
  return a;
}

Poly poly_mul(const Ground& g, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = g.add(r[i + j], g.mul(a[i], b[j]));
  return r;
}

bool poly_is_irreducible(const Ground& g, const Poly& m) {
  Poly mm = poly_trim(g, m);
  int deg = static_cast<int>(mm.size()) - 1;
  if (deg <= 0) return false;
  if (deg == 1) return true;
  // trial division by all monic polynomials of degree 1..deg/2
  std::int64_t p = g.p;
  for (int d = 1; 2 * d <= deg; ++d) {
    // enumerate p^d coefficient tuples
    std::vector<std::int64_t> idx(static_cast<size_t>(d), 0);
    while (true) {
      Poly cand(static_cast<size_t>(d) + 1, Rat(0));
      cand[static_cast<size_t>(d)] = 1;
      for (int i = 0; i < d; ++i) cand[static_cast<size_t>(i)] = Rat(idx[static_cast<size_t>(i)]);
      if (poly_mod(g, mm, cand).empty()) return false;
      int pos = 0;
      while (pos < d && ++idx[static_cast<size_t>(pos)] == p) idx[static_cast<size_t>(pos++)] = 0;
      if (pos == d) break;
    }
  }
  return true;
}

bool is_prime(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

std::int64_t ScalarDomain::order() const {
  if (ground_.p == 0) return 0;
  std::int64_t n = 1;
  for (int i = 0; i < dim_; ++i) n *= ground_.p;
  return n;
}

Scalar ScalarDomain::from_coords(const GVec& c) const {
  if (static_cast<int>(c.size()) != dim_) throw DomainError("coordinate length mismatch");
  GVec r(c.size());
  for (size_t i = 0; i < c.size(); ++i) r[i] = ground_.canon(c[i]);
  return {this, r};
}

Scalar ScalarDomain::from_int(long n) const {
  GVec c = la::zero_vec(dim_);
  Rat q(n);
  for (int i = 0; i < dim_; ++i) c[i] = ground_.mul(q, one_[i]);
  return {this, c};
}

Scalar ScalarDomain::add(const Scalar& x, const Scalar& y) const {
  return {this, la::vadd(ground_, x.c, y.c)};
}
Scalar ScalarDomain::sub(const Scalar& x, const Scalar& y) const {
  return {this, la::vsub(ground_, x.c, y.c)};
}
Scalar ScalarDomain::neg(const Scalar& x) const {
  return {this, la::vscale(ground_, Rat(-1), x.c)};
}

Scalar ScalarDomain::mul(const Scalar& x, const Scalar& y) const {
  GVec r = la::zero_vec(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (ground_.is_zero(x.c[i])) continue;
    for (int j = 0; j < dim_; ++j) {
      if (ground_.is_zero(y.c[j])) continue;
      Rat c = ground_.mul(x.c[i], y.c[j]);
      const GVec& t = table_[i][j];
      for (int l = 0; l < dim_; ++l) r[l] = ground_.add(r[l], ground_.mul(c, t[l]));
    }
  }
  return {this, r};
}

Scalar ScalarDomain::mul_ground(const Rat& c, const Scalar& x) const {
  return {this, la::vscale(ground_, c, x.c)};
}

std::optional<Scalar> ScalarDomain::inverse(const Scalar& x) const {
  if (is_zero(x)) return std::nullopt;
  // y with x*y = 1, via the left-multiplication matrix of x
  GMat lx = left_mult_matrix(x);
  auto sol = la::solve_right(ground_, lx, one_);
  if (!sol) return std::nullopt;
  Scalar y{this, sol->particular};
  if (!is_one(mul(x, y)) || !is_one(mul(y, x))) return std::nullopt;
  return y;
}

Scalar ScalarDomain::pow(const Scalar& x, long e) const {
  assert(e >= 0);
  Scalar r = one(), base = x;
  while (e > 0) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

GMat ScalarDomain::left_mult_matrix(const Scalar& x) const {
  // row j = coords of x * b_j, so that y.c * M = (x*y).c
  GMat m(dim_, dim_);
  for (int j = 0; j < dim_; ++j) m.set_row(j, mul(x, basis_elem(j)).c);
  return m;
}

GMat ScalarDomain::right_mult_matrix(const Scalar& x) const {
  GMat m(dim_, dim_);
  for (int j = 0; j < dim_; ++j) m.set_row(j, mul(basis_elem(j), x).c);
  return m;
}

Scalar ScalarDomain::quat_conj(const Scalar& x) const {
  if (kind_ != DomainKind::quaternion) throw DomainError("not a quaternion domain");
  GVec c = x.c;
  for (int i = 1; i < 4; ++i) c[i] = ground_.neg(c[i]);
  return {this, c};
}

Rat ScalarDomain::quat_norm(const Scalar& x) const {
  Scalar n = mul(x, quat_conj(x));
  for (int i = 1; i < 4; ++i)
    if (!ground_.is_zero(n.c[i])) throw DomainError("norm not central");
  return n.c[0];
}

std::vector<Scalar> ScalarDomain::all_elements() const {
  if (ground_.p == 0) throw DomainError("infinite domain is not enumerable");
  std::vector<Scalar> out;
  std::vector<std::int64_t> idx(static_cast<size_t>(dim_), 0);
  while (true) {
    GVec c(static_cast<size_t>(dim_));
    for (int i = 0; i < dim_; ++i) c[static_cast<size_t>(i)] = Rat(idx[static_cast<size_t>(i)]);
    out.push_back({this, c});
    int pos = 0;
    while (pos < dim_ && ++idx[static_cast<size_t>(pos)] == ground_.p)
      idx[static_cast<size_t>(pos++)] = 0;
    if (pos == dim_) break;
  }
  return out;
}

std::string ScalarDomain::str(const Scalar& x) const { return vec_str(x.c); }

void ScalarDomain::init_table_checks() const {
  // associativity and unit laws on all basis triples/pairs
  for (int i = 0; i < dim_; ++i) {
    Scalar bi = basis_elem(i);
    if (mul(Scalar{this, one_}, bi) != bi || mul(bi, Scalar{this, one_}) != bi)
      throw DomainError("unit law fails in " + name_);
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) {
        Scalar bj = basis_elem(j), bk = basis_elem(k);
        if (mul(mul(bi, bj), bk) != mul(bi, mul(bj, bk)))
          throw DomainError("associativity fails in " + name_);
      }
  }
}

std::shared_ptr<const ScalarDomain> ScalarDomain::rationals() {
  auto d = std::shared_ptr<ScalarDomain>(new ScalarDomain());
  d->kind_ = DomainKind::rationals;
  d->ground_ = Ground{0};
  d->dim_ = 1;
  d->name_ = "Q";
  d->table_ = {{GVec{Rat(1)}}};
  d->one_ = GVec{Rat(1)};
  d->init_table_checks();
  return d;
}

std::shared_ptr<const ScalarDomain> ScalarDomain::finite_field(std::int64_t p, int k,
                                                               const std::vector<Rat>& modulus) {
  if (!is_prime(p)) throw DomainError("characteristic is not prime");
  if (k < 1) throw DomainError("extension degree must be positive");
  if (static_cast<int>(modulus.size()) != k + 1) throw DomainError("modulus must have degree k");
  Ground g{p};
  Poly m(modulus.size());
  for (size_t i = 0; i < modulus.size(); ++i) m[i] = g.canon(modulus[i]);
  if (!g.eq(m.back(), Rat(1))) throw DomainError("modulus must be monic");
  if (k > 1 && !poly_is_irreducible(g, m))
    throw DomainError("modulus polynomial is reducible over F_p");

  auto d = std::shared_ptr<ScalarDomain>(new ScalarDomain());
  d->kind_ = DomainKind::finite_field;
  d->ground_ = g;
  d->dim_ = k;
  d->modulus_ = m;
  d->name_ = "GF(" + std::to_string(p) + (k > 1 ? "^" + std::to_string(k) : "") + ")";
  d->one_ = la::unit_vec(k, 0);
  d->table_.assign(static_cast<size_t>(k), std::vector<GVec>(static_cast<size_t>(k)));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      Poly xi(static_cast<size_t>(i) + 1, Rat(0)), xj(static_cast<size_t>(j) + 1, Rat(0));
      xi.back() = 1;
      xj.back() = 1;
      Poly prod = poly_mod(g, poly_mul(g, xi, xj), m);
      GVec coords = la::zero_vec(k);
      for (size_t l = 0; l < prod.size(); ++l) coords[l] = prod[l];
      d->table_[static_cast<size_t>(i)][static_cast<size_t>(j)] = coords;
    }
  d->init_table_checks();
  // every nonzero element invertible (spanning sample: all of them for small fields)
  if (d->order() <= 4096) {
    for (const Scalar& x : d->all_elements())
      if (!d->is_zero(x) && !d->inverse(x))
        throw DomainError("non-invertible nonzero element in " + d->name_);
  }
  return d;
}

std::shared_ptr<const ScalarDomain> ScalarDomain::quaternion(const Rat& a, const Rat& b) {
  if (a == 0 || b == 0) throw DomainError("quaternion structure constants must be nonzero");
  // Division certificate: the norm form diag(1,-a,-b,ab) must be positive
  // definite, i.e. a < 0 and b < 0 (leading principal minors 1, -a, ab, (ab)^2).
  if (!(a < 0 && b < 0))
    throw DomainError("norm form of (" + rat_str(a) + "," + rat_str(b) +
                      ") is not positive definite; division is not certified");
  auto d = std::shared_ptr<ScalarDomain>(new ScalarDomain());
  d->kind_ = DomainKind::quaternion;
  d->ground_ = Ground{0};
  d->dim_ = 4;
  d->qa_ = a;
  d->qb_ = b;
  d->name_ = "H(" + rat_str(a) + "," + rat_str(b) + ")";
  d->one_ = la::unit_vec(4, 0);
  auto cv = [](Rat c0, Rat c1, Rat c2, Rat c3) { return GVec{c0, c1, c2, c3}; };
  Rat z(0), u(1);
  // basis order 1, i, j, k with i^2 = a, j^2 = b, ij = k = -ji
  d->table_ = {
      {cv(u, z, z, z), cv(z, u, z, z), cv(z, z, u, z), cv(z, z, z, u)},
      {cv(z, u, z, z), cv(a, z, z, z), cv(z, z, z, u), cv(z, z, a, z)},
      {cv(z, z, u, z), cv(z, z, z, -u), cv(b, z, z, z), cv(z, -b, z, z)},
      {cv(z, z, z, u), cv(z, z, -a, z), cv(z, b, z, z), cv(-a * b, z, z, z)},
  };
  d->init_table_checks();
  return d;
}

std::shared_ptr<const ScalarDomain> ScalarDomain::endo_subring(const Ground& ground,
                                                               const std::vector<GMat>& basis,
                                                               const std::string& name) {
  if (basis.empty()) throw DomainError("empty subring basis");
  int m = basis[0].rows;
  int dim = static_cast<int>(basis.size());
  auto flat = [&](const GMat& x) { return x.a; };
  std::vector<GVec> rows;
  for (const auto& b : basis) {
    if (b.rows != m || b.cols != m) throw DomainError("subring basis shape mismatch");
    rows.push_back(flat(b));
  }
  la::Subspace space(ground, m * m, rows);
  if (space.dim() != dim) throw DomainError("subring basis is not independent");
  auto id_coords = la::coords_in(ground, rows, flat(GMat::identity(m)));
  if (!id_coords) throw DomainError("identity not contained in subring span");

  auto d = std::shared_ptr<ScalarDomain>(new ScalarDomain());
  d->kind_ = DomainKind::endo_subring;
  d->ground_ = ground;
  d->dim_ = dim;
  d->name_ = name;
  d->sub_basis_ = basis;
  d->one_ = *id_coords;
  d->table_.assign(static_cast<size_t>(dim), std::vector<GVec>(static_cast<size_t>(dim)));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      GMat prod = la::mmul(ground, basis[static_cast<size_t>(i)], basis[static_cast<size_t>(j)]);
      auto coords = la::coords_in(ground, rows, flat(prod));
      if (!coords) throw DomainError("subring basis is not multiplicatively closed");
      d->table_[static_cast<size_t>(i)][static_cast<size_t>(j)] = *coords;
    }
  d->init_table_checks();
  return d;
}

InvolutionSpec InvolutionSpec::identity(const ScalarDomain& d) {
  InvolutionSpec s;
  s.kind_ = Kind::identity;
  s.name_ = "identity";
  s.mat_ = GMat::identity(d.dim());
  return s;
}

InvolutionSpec InvolutionSpec::frobenius(const ScalarDomain& d, std::int64_t q) {
  if (d.kind() != DomainKind::finite_field)
    throw DomainError("frobenius involution requires a finite field");
  InvolutionSpec s;
  s.kind_ = Kind::frobenius;
  s.name_ = "frobenius(" + std::to_string(q) + ")";
  s.mat_ = GMat(d.dim(), d.dim());
  for (int i = 0; i < d.dim(); ++i)
    s.mat_.set_row(i, d.pow(d.basis_elem(i), q).c);
  s.validate(d);
  return s;
}

InvolutionSpec InvolutionSpec::quat_standard(const ScalarDomain& d) {
  if (d.kind() != DomainKind::quaternion)
    throw DomainError("standard involution requires a quaternion domain");
  InvolutionSpec s;
  s.kind_ = Kind::quat_standard;
  s.name_ = "quaternion-standard";
  s.mat_ = GMat::identity(4);
  for (int i = 1; i < 4; ++i) s.mat_.at(i, i) = Rat(-1);
  s.validate(d);
  return s;
}

InvolutionSpec InvolutionSpec::quat_twisted(const ScalarDomain& d, const Scalar& u) {
  if (d.kind() != DomainKind::quaternion)
    throw DomainError("twisted involution requires a quaternion domain");
  if (!d.ground().is_zero(u.c[0])) throw DomainError("twist element must be pure");
  if (d.quat_norm(u) != 1) throw DomainError("twist element must have norm 1");
  InvolutionSpec s;
  s.kind_ = Kind::quat_twisted;
  s.name_ = "quaternion-twisted(u=" + d.str(u) + ")";
  s.mat_ = GMat(4, 4);
  for (int i = 0; i < 4; ++i) {
    // r -> -u * conj(r) * u
    Scalar img = d.neg(d.mul(d.mul(u, d.quat_conj(d.basis_elem(i))), u));
    s.mat_.set_row(i, img.c);
  }
  s.validate(d);
  return s;
}

InvolutionSpec InvolutionSpec::linear(const ScalarDomain& d, const GMat& m,
                                      const std::string& name) {
  InvolutionSpec s;
  s.kind_ = Kind::linear;
  s.name_ = name;
  s.mat_ = m;
  s.validate(d);
  return s;
}

Scalar InvolutionSpec::apply(const Scalar& x) const {
  return {x.dom, la::apply(x.dom->ground(), x.c, mat_)};
}

bool InvolutionSpec::is_identity_map(const ScalarDomain& d) const {
  return mat_ == GMat::identity(d.dim());
}

void InvolutionSpec::validate(const ScalarDomain& d) const {
  const Ground& g = d.ground();
  GMat sq = la::mmul(g, mat_, mat_);
  if (!(sq == GMat::identity(d.dim())))
    throw DomainError("involution " + name_ + " does not square to the identity");
  if (apply(d.one()) != d.one()) throw DomainError("involution must fix 1");
  for (int i = 0; i < d.dim(); ++i)
    for (int j = 0; j < d.dim(); ++j) {
      Scalar bi = d.basis_elem(i), bj = d.basis_elem(j);
      if (apply(d.mul(bi, bj)) != d.mul(apply(bj), apply(bi)))
        throw DomainError("involution " + name_ + " is not anti-multiplicative");
    }
}

std::vector<Scalar> fixed_set_basis(const ScalarDomain& d, const InvolutionSpec& inv) {
  const Ground& g = d.ground();
  GMat m = la::msub(g, inv.matrix(), GMat::identity(d.dim()));
  la::Subspace ker = la::left_kernel(g, m);
  std::vector<Scalar> out;
  for (const auto& b : ker.basis()) out.push_back(d.from_coords(b));
  return out;
}

}  // namespace rank1
