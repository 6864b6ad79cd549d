#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rank1/linalg.hpp"

#include <random>

using namespace rank1;
using namespace rank1::la;

namespace {

GVec rand_vec(std::mt19937_64& rng, const Ground& g, int n) {
  std::uniform_int_distribution<int> d(-3, 3);
  GVec v(static_cast<size_t>(n));
  for (auto& c : v) c = g.canon(Rat(d(rng)));
  return v;
}

GMat rand_mat(std::mt19937_64& rng, const Ground& g, int r, int c) {
  GMat m(r, c);
  for (auto& x : m.a) {
    std::uniform_int_distribution<int> d(-3, 3);
    x = g.canon(Rat(d(rng)));
  }
  return m;
}

}  // namespace

TEST_CASE("ground arithmetic mod p") {
  Ground g{5};
  CHECK(g.canon(Rat(7)) == Rat(2));
  CHECK(g.canon(Rat(-1)) == Rat(4));
  CHECK(g.canon(Rat(1, 2)) == Rat(3));  // 2*3 = 6 = 1
  CHECK(g.inv(Rat(2)) == Rat(3));
  CHECK(g.mul(Rat(3), Rat(4)) == Rat(2));
}

TEST_CASE("rref is canonical and idempotent") {
  for (std::int64_t p : {std::int64_t(0), std::int64_t(2), std::int64_t(5)}) {
    Ground g{p};
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<GVec> rows;
      for (int i = 0; i < 4; ++i) rows.push_back(rand_vec(rng, g, 6));
      Subspace s(g, 6, rows);
      // same span when fed shuffled scaled combinations
      std::vector<GVec> rows2;
      for (int i = 0; i < 4; ++i) {
        GVec v = zero_vec(6);
        for (int j = 0; j < 4; ++j) {
          std::uniform_int_distribution<int> d(-2, 2);
          v = vadd(g, v, vscale(g, g.canon(Rat(d(rng))), rows[static_cast<size_t>(j)]));
        }
        rows2.push_back(v);
      }
      Subspace s2(g, 6, rows2);
      CHECK(s.contains(g, s2));
      Subspace again(g, 6, s.basis());
      CHECK(s == again);
    }
  }
}

TEST_CASE("left kernel and solve") {
  Ground g{0};
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    GMat m = rand_mat(rng, g, 4, 5);
    Subspace k = left_kernel(g, m);
    for (const auto& v : k.basis()) CHECK(vzero(g, apply(g, v, m)));
    // rank-nullity
    std::vector<GVec> imrows;
    for (int i = 0; i < 4; ++i) imrows.push_back(m.row(i));
    Subspace im(g, 5, imrows);
    CHECK(k.dim() + im.dim() == 4);
    // solvable system round trip
    GVec x = rand_vec(rng, g, 4);
    GVec w = apply(g, x, m);
    auto sol = solve_right(g, m, w);
    REQUIRE(sol.has_value());
    CHECK(apply(g, sol->particular, m) == w);
  }
}

TEST_CASE("sum and intersection dimensions") {
  Ground g{3};
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<GVec> r1, r2;
    for (int i = 0; i < 3; ++i) r1.push_back(rand_vec(rng, g, 7));
    for (int i = 0; i < 3; ++i) r2.push_back(rand_vec(rng, g, 7));
    Subspace u(g, 7, r1), w(g, 7, r2);
    Subspace s = sum(g, u, w), x = intersect(g, u, w);
    CHECK(s.dim() + x.dim() == u.dim() + w.dim());
    for (const auto& b : x.basis()) {
      CHECK(u.contains(g, b));
      CHECK(w.contains(g, b));
    }
  }
}

TEST_CASE("residual matrix agrees with reduce") {
  Ground g{0};
  std::mt19937_64 rng(3);
  std::vector<GVec> rows;
  for (int i = 0; i < 3; ++i) rows.push_back(rand_vec(rng, g, 6));
  Subspace u(g, 6, rows);
  GMat r = u.residual_matrix(g);
  for (int trial = 0; trial < 20; ++trial) {
    GVec v = rand_vec(rng, g, 6);
    CHECK(apply(g, v, r) == u.reduce(g, v));
  }
}

TEST_CASE("matrix inverse") {
  Ground g{5};
  std::mt19937_64 rng(9);
  int found = 0;
  for (int trial = 0; trial < 40 && found < 10; ++trial) {
    GMat m = rand_mat(rng, g, 4, 4);
    auto inv = minv(g, m);
    if (!inv) continue;
    ++found;
    CHECK(mmul(g, m, *inv) == GMat::identity(4));
    CHECK(mmul(g, *inv, m) == GMat::identity(4));
  }
  CHECK(found >= 5);
}

TEST_CASE("subquotient induced action") {
  Ground g{2};
  // V = F_2^4, W = span{e0,e1,e2}, Z = span{e0}
  Subspace w(g, 4, {unit_vec(4, 0), unit_vec(4, 1), unit_vec(4, 2)});
  Subspace z(g, 4, {unit_vec(4, 0)});
  Subquotient q(g, w, z);
  CHECK(q.dim() == 2);
  // ambient map: swap e1,e2 and add e0 to e1 (stabilizes both)
  GMat m = GMat::identity(4);
  m.at(1, 1) = 0;
  m.at(1, 2) = 1;
  m.at(2, 2) = 0;
  m.at(2, 1) = 1;
  m.at(1, 0) = 1;
  GMat ind = q.induced(g, m);
  GMat expect(2, 2);
  expect.at(0, 1) = 1;
  expect.at(1, 0) = 1;
  CHECK(ind == expect);
  GVec v = vadd(g, unit_vec(4, 1), unit_vec(4, 0));
  CHECK(q.project(g, v) == GVec{Rat(1), Rat(0)});
}
