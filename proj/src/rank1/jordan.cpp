#include "rank1/jordan.hpp"

#include <cassert>
#include <random>

namespace rank1 {

KMat MatrixRing::zero() const {
  KMat m;
  m.dom = dom.get();
  m.n = n;
  m.a.assign(static_cast<size_t>(n) * n, dom->zero());
  return m;
}

KMat MatrixRing::identity() const {
  KMat m = zero();
  for (int i = 0; i < n; ++i) m.at(i, i) = dom->one();
  return m;
}

KMat MatrixRing::from_scalar(const Scalar& s) const {
  KMat m = zero();
  for (int i = 0; i < n; ++i) m.at(i, i) = s;
  return m;
}

KMat km_add(const KMat& x, const KMat& y) {
  KMat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.dom->add(x.a[i], y.a[i]);
  return r;
}

KMat km_sub(const KMat& x, const KMat& y) {
  KMat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.dom->sub(x.a[i], y.a[i]);
  return r;
}

KMat km_neg(const KMat& x) {
  KMat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.dom->neg(x.a[i]);
  return r;
}

KMat km_mul(const KMat& x, const KMat& y) {
  assert(x.n == y.n && x.dom == y.dom);
  KMat r = x;
  const ScalarDomain* d = x.dom;
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      Scalar s = d->zero();
      for (int k = 0; k < x.n; ++k) s = d->add(s, d->mul(x.at(i, k), y.at(k, j)));
      r.at(i, j) = s;
    }
  return r;
}

bool km_eq(const KMat& x, const KMat& y) {
  if (x.n != y.n || x.dom != y.dom) return false;
  for (size_t i = 0; i < x.a.size(); ++i)
    if (!(x.a[i] == y.a[i])) return false;
  return true;
}

bool km_is_zero(const KMat& x) {
  for (const auto& s : x.a)
    if (!x.dom->is_zero(s)) return false;
  return true;
}

std::optional<KMat> km_inverse(const KMat& x) {
  const ScalarDomain* d = x.dom;
  int n = x.n;
  KMat work = x;
  KMat inv;
  inv.dom = d;
  inv.n = n;
  inv.a.assign(static_cast<size_t>(n) * n, d->zero());
  for (int i = 0; i < n; ++i) inv.at(i, i) = d->one();
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    std::optional<Scalar> pinv;
    for (int i = col; i < n; ++i) {
      pinv = d->inverse(work.at(i, col));
      if (pinv) {
        piv = i;
        break;
      }
    }
    if (piv < 0) return std::nullopt;
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(work.at(piv, j), work.at(col, j));
        std::swap(inv.at(piv, j), inv.at(col, j));
      }
    for (int j = 0; j < n; ++j) {
      work.at(col, j) = d->mul(*pinv, work.at(col, j));
      inv.at(col, j) = d->mul(*pinv, inv.at(col, j));
    }
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      Scalar c = work.at(i, col);
      if (d->is_zero(c)) continue;
      for (int j = 0; j < n; ++j) {
        work.at(i, j) = d->sub(work.at(i, j), d->mul(c, work.at(col, j)));
        inv.at(i, j) = d->sub(inv.at(i, j), d->mul(c, inv.at(col, j)));
      }
    }
  }
  // two-sided verification
  KMat id;
  id.dom = d;
  id.n = n;
  id.a.assign(static_cast<size_t>(n) * n, d->zero());
  for (int i = 0; i < n; ++i) id.at(i, i) = d->one();
  if (!km_eq(km_mul(x, inv), id) || !km_eq(km_mul(inv, x), id)) return std::nullopt;
  return inv;
}

GVec km_flat(const KMat& x) {
  GVec v;
  v.reserve(x.a.size() * static_cast<size_t>(x.dom->dim()));
  for (const auto& s : x.a)
    for (const auto& c : s.c) v.push_back(c);
  return v;
}

KMat km_unflat(const MatrixRing& ring, const GVec& v) {
  KMat m = ring.zero();
  int d = ring.dom->dim();
  assert(static_cast<int>(v.size()) == ring.flat_dim());
  for (size_t e = 0; e < m.a.size(); ++e) {
    GVec c(static_cast<size_t>(d));
    for (int l = 0; l < d; ++l) c[static_cast<size_t>(l)] = v[e * static_cast<size_t>(d) + l];
    m.a[e] = ring.dom->from_coords(c);
  }
  return m;
}

std::string km_str(const KMat& x) {
  std::string s = "[";
  for (int i = 0; i < x.n; ++i) {
    if (i) s += "; ";
    for (int j = 0; j < x.n; ++j) {
      if (j) s += ",";
      s += x.dom->str(x.at(i, j));
    }
  }
  return s + "]";
}

KMat q_operator(const KMat& a, const KMat& b) { return km_mul(km_mul(a, b), a); }

KMat q_cross(const KMat& a, const KMat& b, const KMat& c) {
  return km_sub(km_sub(q_operator(km_add(a, b), c), q_operator(a, c)), q_operator(b, c));
}

JordanSubspace::JordanSubspace(MatrixRing ring, std::vector<KMat> basis)
    : ring_(std::move(ring)), basis_(std::move(basis)) {
  std::vector<GVec> rows;
  for (const auto& m : basis_) rows.push_back(km_flat(m));
  flat_ = la::Subspace(ring_.dom->ground(), ring_.flat_dim(), rows);
  if (flat_.dim() != static_cast<int>(basis_.size()))
    throw DomainError("subspace basis is not linearly independent");
  contains_identity_ = contains(ring_.identity());
}

bool JordanSubspace::contains(const KMat& m) const {
  return flat_.contains(ring_.dom->ground(), km_flat(m));
}

std::vector<KMat> JordanSubspace::all_elements(std::int64_t cap) const {
  const Ground& g = ring_.dom->ground();
  if (g.p == 0) throw DomainError("infinite subspace is not enumerable");
  std::int64_t total = 1;
  for (int i = 0; i < dim(); ++i) {
    total *= g.p;
    if (total > cap) throw DomainError("subspace too large to enumerate");
  }
  std::vector<KMat> out;
  std::vector<std::int64_t> idx(static_cast<size_t>(dim()), 0);
  while (true) {
    KMat m = ring_.zero();
    for (int i = 0; i < dim(); ++i)
      if (idx[static_cast<size_t>(i)] != 0) {
        KMat t = basis_[static_cast<size_t>(i)];
        for (auto& s : t.a) s = ring_.dom->mul_ground(Rat(idx[static_cast<size_t>(i)]), s);
        m = km_add(m, t);
      }
    out.push_back(m);
    int pos = 0;
    while (pos < dim() && ++idx[static_cast<size_t>(pos)] == g.p)
      idx[static_cast<size_t>(pos++)] = 0;
    if (pos == dim()) break;
  }
  return out;
}

ClosureResult is_jordan_closed(const JordanSubspace& j) {
  for (const auto& a : j.basis())
    for (const auto& b : j.basis()) {
      KMat q = q_operator(a, b);
      if (!j.contains(q)) return {false, JordanWitness{a, b, q, "Q_a(b) escapes"}};
    }
  for (int i = 0; i < j.dim(); ++i)
    for (int k = i + 1; k < j.dim(); ++k)
      for (const auto& b : j.basis()) {
        const KMat& ai = j.basis()[static_cast<size_t>(i)];
        const KMat& ak = j.basis()[static_cast<size_t>(k)];
        if (!j.contains(q_cross(ai, ak, b))) {
          KMat sum = km_add(ai, ak);
          return {false, JordanWitness{sum, b, q_operator(sum, b), "Q_{a+a'}(b) escapes"}};
        }
      }
  return {true, std::nullopt};
}

namespace {

KMat random_combination(const JordanSubspace& j, std::mt19937_64& rng, int spread) {
  std::uniform_int_distribution<int> d(-spread, spread);
  KMat m = j.ring().zero();
  for (const auto& b : j.basis()) {
    Rat c(d(rng));
    if (c == 0) continue;
    KMat t = b;
    for (auto& s : t.a) s = j.ring().dom->mul_ground(c, s);
    m = km_add(m, t);
  }
  return m;
}

}  // namespace

DivisionResult is_division_jordan(const JordanSubspace& j, int samples, unsigned long seed) {
  DivisionResult res;
  if (!j.contains_identity()) {
    res.ok = false;
    res.witness = JordanWitness{j.ring().identity(), j.ring().identity(), j.ring().identity(),
                                "identity not in subspace"};
    return res;
  }
  const Ground& g = j.ring().dom->ground();
  std::int64_t count = 1;
  bool finite = g.p != 0;
  if (finite)
    for (int i = 0; i < j.dim() && count <= 4096; ++i) count *= g.p;
  if (finite && count <= 4096) {
    res.mode = CheckMode::exhaustive;
    for (const auto& m : j.all_elements()) {
      if (km_is_zero(m)) continue;
      auto inv = km_inverse(m);
      if (!inv || !j.contains(*inv)) {
        res.ok = false;
        res.witness = JordanWitness{m, m, m, inv ? "inverse escapes" : "not invertible"};
        return res;
      }
    }
    res.ok = true;
    return res;
  }
  // structural certificate: inside a positive-definite quaternion algebra,
  // x^{-1} = conj(x)/N(x), so closure under conj certifies division exactly
  if (j.ring().n == 1 && j.ring().dom->kind() == DomainKind::quaternion) {
    bool conj_closed = true;
    for (const auto& b : j.basis()) {
      KMat cb = b;
      cb.a[0] = j.ring().dom->quat_conj(b.a[0]);
      if (!j.contains(cb)) {
        conj_closed = false;
        break;
      }
    }
    if (conj_closed) {
      res.mode = CheckMode::certificate;
      res.certificate =
          "conjugation-closed subspace of an anisotropic quaternion algebra; "
          "x^{-1} = conj(x)/N(x) stays in the subspace";
      res.ok = true;
      return res;
    }
  }
  res.mode = CheckMode::sampled;
  std::mt19937_64 rng(seed);
  std::vector<KMat> pool = j.basis();
  for (int i = 0; i + 1 < j.dim(); ++i)
    pool.push_back(km_add(j.basis()[static_cast<size_t>(i)], j.basis()[static_cast<size_t>(i) + 1]));
  while (static_cast<int>(pool.size()) < samples) pool.push_back(random_combination(j, rng, 3));
  for (const auto& m : pool) {
    if (km_is_zero(m)) continue;
    ++res.samples;
    auto inv = km_inverse(m);
    if (!inv || !j.contains(*inv)) {
      res.ok = false;
      res.witness = JordanWitness{m, m, m, inv ? "inverse escapes" : "not invertible"};
      return res;
    }
  }
  res.ok = true;
  return res;
}

ClosureResult hua_closure_check(const JordanSubspace& j) {
  for (const auto& a : j.basis())
    for (const auto& b : j.basis()) {
      KMat bab = km_mul(km_mul(b, a), b);
      if (!j.contains(bab)) return {false, JordanWitness{b, a, bab, "bab escapes"}};
    }
  return {true, std::nullopt};
}

CommClassification classify_commutative(const JordanSubspace& j) {
  CommClassification out;
  out.commutative = true;
  for (int i = 0; i < j.dim() && out.commutative; ++i)
    for (int k = i + 1; k < j.dim(); ++k) {
      const KMat& a = j.basis()[static_cast<size_t>(i)];
      const KMat& b = j.basis()[static_cast<size_t>(k)];
      KMat ab = km_mul(a, b), ba = km_mul(b, a);
      if (!km_eq(ab, ba)) {
        out.commutative = false;
        out.witness = JordanWitness{a, b, km_sub(ab, ba), "ab - ba"};
        break;
      }
    }
  // independent criterion: Q_a Q_b = Q_b Q_a as maps on J. Basis pairs alone
  // can miss noncommutativity (Q-operators are quadratic in their index), so
  // pairwise sums are included as indices.
  std::vector<KMat> idx = j.basis();
  for (int i = 0; i < j.dim(); ++i)
    for (int k = i + 1; k < j.dim(); ++k)
      idx.push_back(km_add(j.basis()[static_cast<size_t>(i)], j.basis()[static_cast<size_t>(k)]));
  bool q_comm = true;
  for (const auto& a : idx) {
    for (const auto& b : idx) {
      for (const auto& c : j.basis()) {
        if (!km_eq(q_operator(b, q_operator(a, c)), q_operator(a, q_operator(b, c)))) {
          q_comm = false;
          break;
        }
      }
      if (!q_comm) break;
    }
    if (!q_comm) break;
  }
  out.q_agrees = (q_comm == out.commutative);
  return out;
}

InvolutorySet::InvolutorySet(std::shared_ptr<const ScalarDomain> d, InvolutionSpec i,
                             std::vector<Scalar> basis)
    : dom(std::move(d)), inv(std::move(i)), k0_basis(std::move(basis)) {
  std::vector<GVec> rows;
  for (const auto& s : k0_basis) rows.push_back(s.c);
  k0 = la::Subspace(dom->ground(), dom->dim(), rows);
}

bool InvolutorySet::k0_contains(const Scalar& x) const {
  return k0.contains(dom->ground(), x.c);
}

Scalar InvolutorySet::k0_reduce(const Scalar& x) const {
  return dom->from_coords(k0.reduce(dom->ground(), x.c));
}

AmpleResult is_ample(const InvolutorySet& s, int samples, unsigned long seed) {
  AmpleResult res;
  const ScalarDomain& d = *s.dom;
  if (!s.k0_contains(d.one())) {
    res.witness = "1 not in K0";
    return res;
  }
  for (const auto& b : s.k0_basis)
    if (!(s.inv.apply(b) == b)) {
      res.witness = "K0 element not fixed: " + d.str(b);
      return res;
    }
  std::vector<Scalar> spanning;
  if (d.ground().p != 0 && d.order() <= 4096) {
    res.mode = CheckMode::exhaustive;
    spanning = d.all_elements();
  } else {
    res.mode = CheckMode::sampled;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(-3, 3);
    for (int i = 0; i < d.dim(); ++i) spanning.push_back(d.basis_elem(i));
    for (int i = 0; i < d.dim(); ++i)
      for (int k = i + 1; k < d.dim(); ++k)
        spanning.push_back(d.add(d.basis_elem(i), d.basis_elem(k)));
    while (static_cast<int>(spanning.size()) < samples) {
      GVec c(static_cast<size_t>(d.dim()));
      for (auto& x : c) x = Rat(dist(rng));
      spanning.push_back(d.from_coords(c));
    }
    res.samples = static_cast<int>(spanning.size());
  }
  for (const auto& x : spanning) {
    Scalar xs = s.inv.apply(x);
    for (const auto& k0 : s.k0_basis) {
      Scalar v = d.mul(d.mul(xs, k0), x);
      if (!s.k0_contains(v)) {
        res.witness = "x* k0 x escapes: x = " + d.str(x) + ", k0 = " + d.str(k0);
        return res;
      }
    }
    Scalar tr = d.add(x, xs);
    if (!s.k0_contains(tr)) {
      res.witness = "trace escapes: x + x* = " + d.str(tr) + " for x = " + d.str(x);
      return res;
    }
  }
  res.ok = true;
  return res;
}

SubRing::SubRing(MatrixRing r, std::vector<KMat> b, bool verify_closed)
    : ring(std::move(r)), basis(std::move(b)) {
  std::vector<GVec> rows;
  for (const auto& m : basis) rows.push_back(km_flat(m));
  flat = la::Subspace(ring.dom->ground(), ring.flat_dim(), rows);
  if (flat.dim() != static_cast<int>(basis.size()))
    throw DomainError("subring basis is not independent");
  if (!contains(ring.identity())) throw DomainError("subring must contain 1");
  if (verify_closed)
    for (const auto& x : basis)
      for (const auto& y : basis)
        if (!contains(km_mul(x, y))) throw DomainError("subring basis not multiplicatively closed");
}

IdealLemmaResult ideal_lemma_check(const SubRing& r, const KMat& x) {
  IdealLemmaResult out;
  const Ground& g = r.ring.dom->ground();
  auto xinv = km_inverse(x);
  if (!xinv) {
    out.detail = "x is not a unit";
    return out;
  }
  KMat x1 = km_add(x, r.ring.identity());
  auto x1inv = km_inverse(x1);
  if (!x1inv) {
    out.detail = "x+1 is not a unit";
    return out;
  }
  auto conj_stable = [&](const KMat& u, const KMat& uinv) {
    for (const auto& b : r.basis)
      if (!r.contains(km_mul(km_mul(uinv, b), u))) return false;
    return true;
  };
  if (!conj_stable(x, *xinv) || !conj_stable(x1, *x1inv)) {
    out.detail = "x does not normalize the subring";
    return out;
  }
  if (r.contains(*x1inv)) {
    out.branch = IdealLemmaBranch::inverse_in_subring;
    out.detail = "(x+1)^{-1} lies in the subring";
    return out;
  }
  // I = R cap (x+1)R
  std::vector<GVec> x1r;
  for (const auto& b : r.basis) x1r.push_back(km_flat(km_mul(x1, b)));
  la::Subspace right(g, r.ring.flat_dim(), x1r);
  la::Subspace ideal = la::intersect(g, r.flat, right);
  out.ideal_dim = ideal.dim();
  if (ideal.dim() >= r.flat.dim()) {
    out.detail = "intersection is the whole subring, contradicting the dichotomy";
    return out;
  }
  std::vector<KMat> ibasis;
  for (const auto& v : ideal.basis()) ibasis.push_back(km_unflat(r.ring, v));
  auto in_ideal = [&](const KMat& m) { return ideal.contains(g, km_flat(m)); };
  for (const auto& i : ibasis)
    for (const auto& b : r.basis)
      if (!in_ideal(km_mul(i, b)) || !in_ideal(km_mul(b, i))) {
        out.detail = "intersection is not a two-sided ideal";
        return out;
      }
  for (const auto& u : r.basis) {
    KMat diff = km_sub(km_mul(km_mul(*xinv, u), x), u);
    if (!in_ideal(diff)) {
      out.detail = "x^{-1} u x - u escapes the ideal for u = " + km_str(u);
      return out;
    }
  }
  out.branch = IdealLemmaBranch::proper_ideal;
  out.detail = "proper two-sided ideal of dimension " + std::to_string(ideal.dim());
  return out;
}

}  // namespace rank1
