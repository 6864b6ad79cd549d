#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rank1/domain.hpp"

#include <array>
#include <random>

using namespace rank1;

namespace {

// Independent oracle for F_4 = {0, 1, w, w+1} with w^2 = w + 1, elements
// encoded as (c0, c1) with value c0 + c1*w, index = c0 + 2*c1.
int f4_mul_oracle(int x, int y) {
  static const std::array<std::array<int, 4>, 4> tab = {{
      {0, 0, 0, 0},
      {0, 1, 2, 3},
      {0, 2, 3, 1},  // w*w = w+1, w*(w+1) = w^2+w = 1
      {0, 3, 1, 2},
  }};
  return tab[static_cast<size_t>(x)][static_cast<size_t>(y)];
}

int f4_index(const Scalar& s) {
  return static_cast<int>(numerator(s.c[0])) + 2 * static_cast<int>(numerator(s.c[1]));
}

// Independent oracle for Hamilton quaternions: products of basis units with
// sign, basis order 1,i,j,k.
struct QTerm {
  int sign;
  int unit;
};
QTerm ham_unit_mul(int a, int b) {
  static const int unit[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static const int sign[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  return {sign[a][b], unit[a][b]};
}

GVec ham_mul_oracle(const GVec& x, const GVec& y) {
  GVec r = la::zero_vec(4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      QTerm t = ham_unit_mul(a, b);
      r[static_cast<size_t>(t.unit)] += Rat(t.sign) * x[static_cast<size_t>(a)] * y[static_cast<size_t>(b)];
    }
  return r;
}

}  // namespace

TEST_CASE("F4 construction and arithmetic vs oracle") {
  auto f4 = ScalarDomain::finite_field(2, 2, {Rat(1), Rat(1), Rat(1)});
  CHECK(f4->order() == 4);
  Scalar w = f4->basis_elem(1);
  Scalar w2 = f4->mul(w, w);
  CHECK(w2 == f4->add(w, f4->one()));  // w^2 = w+1
  auto elems = f4->all_elements();
  for (const auto& x : elems)
    for (const auto& y : elems)
      CHECK(f4_index(f4->mul(x, y)) == f4_mul_oracle(f4_index(x), f4_index(y)));
  // inverses
  for (const auto& x : elems) {
    if (f4->is_zero(x)) continue;
    auto ix = f4->inverse(x);
    REQUIRE(ix.has_value());
    CHECK(f4->is_one(f4->mul(x, *ix)));
  }
}

TEST_CASE("reducible modulus rejected") {
  // x^2 + 1 = (x+1)^2 over F_2
  CHECK_THROWS_AS(ScalarDomain::finite_field(2, 2, {Rat(1), Rat(0), Rat(1)}), DomainError);
  CHECK_THROWS_AS(ScalarDomain::finite_field(4, 1, {Rat(1), Rat(1)}), DomainError);
}

TEST_CASE("Hamilton quaternions vs oracle") {
  auto h = ScalarDomain::quaternion(Rat(-1), Rat(-1));
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(-3, 3);
  for (int trial = 0; trial < 60; ++trial) {
    GVec a(4), b(4);
    for (auto& c : a) c = Rat(d(rng));
    for (auto& c : b) c = Rat(d(rng));
    Scalar x = h->from_coords(a), y = h->from_coords(b);
    CHECK(h->mul(x, y).c == ham_mul_oracle(a, b));
  }
  // norm(1+i+j+k) = 4, by N(r) = r * conj(r)
  Scalar r = h->from_coords({Rat(1), Rat(1), Rat(1), Rat(1)});
  CHECK(h->quat_norm(r) == Rat(4));
  // anisotropy sample: nonzero elements have nonzero norm and inverses
  for (int trial = 0; trial < 40; ++trial) {
    GVec a(4);
    for (auto& c : a) c = Rat(d(rng));
    Scalar x = h->from_coords(a);
    if (h->is_zero(x)) continue;
    CHECK(h->quat_norm(x) > 0);
    auto ix = h->inverse(x);
    REQUIRE(ix.has_value());
    CHECK(h->is_one(h->mul(*ix, x)));
  }
}

TEST_CASE("split quaternion constants rejected") {
  CHECK_THROWS_AS(ScalarDomain::quaternion(Rat(1), Rat(1)), DomainError);
  CHECK_THROWS_AS(ScalarDomain::quaternion(Rat(-1), Rat(0)), DomainError);
}

TEST_CASE("associativity and distributivity spot checks") {
  auto h = ScalarDomain::quaternion(Rat(-1), Rat(-1));
  auto f9 = ScalarDomain::finite_field(3, 2, {Rat(1), Rat(0), Rat(1)});
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> d(-2, 2);
  auto rand_scalar = [&](const ScalarDomain& dom) {
    GVec c(static_cast<size_t>(dom.dim()));
    for (auto& x : c) x = Rat(d(rng));
    return dom.from_coords(c);
  };
  for (const auto* dom : {h.get(), f9.get()}) {
    for (int trial = 0; trial < 40; ++trial) {
      Scalar x = rand_scalar(*dom), y = rand_scalar(*dom), z = rand_scalar(*dom);
      CHECK(dom->mul(dom->mul(x, y), z) == dom->mul(x, dom->mul(y, z)));
      CHECK(dom->mul(x, dom->add(y, z)) == dom->add(dom->mul(x, y), dom->mul(x, z)));
      CHECK(dom->mul(dom->add(x, y), z) == dom->add(dom->mul(x, z), dom->mul(y, z)));
    }
  }
}

TEST_CASE("involutions") {
  auto f4 = ScalarDomain::finite_field(2, 2, {Rat(1), Rat(1), Rat(1)});
  auto frob = InvolutionSpec::frobenius(*f4, 2);
  Scalar w = f4->basis_elem(1);
  CHECK(frob.apply(w) == f4->mul(w, w));  // w -> w^2

  auto h = ScalarDomain::quaternion(Rat(-1), Rat(-1));
  Scalar i = h->basis_elem(1), j = h->basis_elem(2), k = h->basis_elem(3);
  auto std_inv = InvolutionSpec::quat_standard(*h);
  CHECK(std_inv.apply(i) == h->neg(i));
  auto tw = InvolutionSpec::quat_twisted(*h, i);
  CHECK(tw.apply(i) == h->neg(i));
  CHECK(tw.apply(j) == j);
  CHECK(tw.apply(k) == k);

  // anti-automorphism property on random pairs
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> d(-2, 2);
  for (int trial = 0; trial < 40; ++trial) {
    GVec a(4), b(4);
    for (auto& c : a) c = Rat(d(rng));
    for (auto& c : b) c = Rat(d(rng));
    Scalar x = h->from_coords(a), y = h->from_coords(b);
    CHECK(tw.apply(h->mul(x, y)) == h->mul(tw.apply(y), tw.apply(x)));
    CHECK(tw.apply(tw.apply(x)) == x);
  }
}

TEST_CASE("fixed set bases") {
  auto f4 = ScalarDomain::finite_field(2, 2, {Rat(1), Rat(1), Rat(1)});
  auto frob = InvolutionSpec::frobenius(*f4, 2);
  auto fixed = fixed_set_basis(*f4, frob);
  REQUIRE(fixed.size() == 1);
  CHECK(fixed[0] == f4->one());

  auto h = ScalarDomain::quaternion(Rat(-1), Rat(-1));
  auto tw = InvolutionSpec::quat_twisted(*h, h->basis_elem(1));
  auto fixed_tw = fixed_set_basis(*h, tw);
  CHECK(fixed_tw.size() == 3);  // span{1, j, k}
  la::Subspace span(h->ground(), 4,
                    {la::unit_vec(4, 0), la::unit_vec(4, 2), la::unit_vec(4, 3)});
  for (const auto& s : fixed_tw) CHECK(span.contains(h->ground(), s.c));

  auto std_inv = InvolutionSpec::quat_standard(*h);
  auto fixed_std = fixed_set_basis(*h, std_inv);
  REQUIRE(fixed_std.size() == 1);
  CHECK(fixed_std[0] == h->one());
}

TEST_CASE("endo subring domain") {
  // F_4 realized as 2x2 matrices over F_2: 1 -> I, w -> companion of x^2+x+1
  Ground g{2};
  GMat id = GMat::identity(2);
  GMat w(2, 2);
  w.at(0, 1) = 1;
  w.at(1, 0) = 1;
  w.at(1, 1) = 1;
  auto dom = ScalarDomain::endo_subring(g, {id, w}, "F4-as-endos");
  Scalar ww = dom->mul(dom->basis_elem(1), dom->basis_elem(1));
  CHECK(ww == dom->add(dom->basis_elem(1), dom->one()));
  auto inv = dom->inverse(dom->basis_elem(1));
  REQUIRE(inv.has_value());
  CHECK(dom->is_one(dom->mul(*inv, dom->basis_elem(1))));
}
