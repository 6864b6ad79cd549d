#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rank1/groupcore.hpp"

using namespace rank1;

namespace {

Instance su3_f4() {
  auto f4 = ScalarDomain::finite_field(2, 2, {Rat(1), Rat(1), Rat(1)});
  auto frob = InvolutionSpec::frobenius(*f4, 2);
  InvolutorySet iset(f4, frob, {f4->one()});
  Scalar w = f4->basis_elem(1);
  PseudoQuadraticSpace sp(iset, {w}, {{f4->one()}});
  return make_pq_instance(extend_witt1(sp), "su3-f4");
}

Instance su_quat() {
  auto h = ScalarDomain::quaternion(Rat(-1), Rat(-1));
  auto tw = InvolutionSpec::quat_twisted(*h, h->basis_elem(1));
  InvolutorySet iset(h, tw, {h->one(), h->basis_elem(2), h->basis_elem(3)});
  PseudoQuadraticSpace sp(iset, {h->basis_elem(1)}, {{h->mul_ground(Rat(2), h->basis_elem(1))}});
  return make_pq_instance(extend_witt1(sp), "su-quat-q");
}

Instance orth_f2() {
  auto f2 = ScalarDomain::finite_field(2, 1, {Rat(0), Rat(1)});
  Scalar one = f2->one(), zero = f2->zero();
  QuadraticSpace q(f2, {one, one, one},
                   {{zero, one, zero}, {one, zero, zero}, {zero, zero, zero}});
  return make_orth_instance(orth_build(q), "orth-f2");
}

Instance sl2_f5() {
  auto f5 = ScalarDomain::finite_field(5, 1, {Rat(0), Rat(1)});
  MatrixRing r5{f5, 1};
  JordanSubspace j(r5, {r5.identity()});
  return sl2jr_build(j, "sl2-f5");
}

}  // namespace

TEST_CASE("sl2-f5 baseline: quadratic verdict and the b(a) solver") {
  Instance inst = sl2_f5();
  RankOneCtx ctx(inst);
  CHECK(ctx.cva() == *inst.expected_cva);
  CHECK(ctx.cvb() == *inst.expected_cvb);
  CHECK(ctx.va() == *inst.expected_va);
  auto verdict = ctx.cubic_verify();
  CHECK(verdict.kind == CubicVerdict::quadratic);
  // b(a) with conjugation post-check for all 4 nontrivial elements
  int solved = 0;
  for (const auto& z : *inst.A.all_params) {
    if (la::vzero(inst.gr, z)) continue;
    std::string err;
    auto res = ctx.find_b(inst.A.elem(z), &err);
    INFO(err);
    REQUIRE(res.has_value());
    ++solved;
    // a(b(a)) = a
    auto back = ctx.find_a(res->mat, &err);
    REQUIRE(back.has_value());
    CHECK(back->mat == inst.A.elem(z));
  }
  CHECK(solved == 4);
  // identity is rejected
  std::string err;
  CHECK_FALSE(ctx.find_b(GMat::identity(inst.vdim), &err).has_value());
}

TEST_CASE("su3-f4: cubic verdict, subspaces, special root subgroup") {
  Instance inst = su3_f4();
  RankOneCtx ctx(inst);
  CHECK(ctx.cva() == *inst.expected_cva);
  CHECK(ctx.cvb() == *inst.expected_cvb);
  CHECK(ctx.va() == *inst.expected_va);
  CHECK(ctx.vb() == *inst.expected_vb);
  auto verdict = ctx.cubic_verify();
  CHECK(verdict.kind == CubicVerdict::cubic);
  CHECK_FALSE(verdict.witness.empty());
  // normal form: [V,G] = V and C_V(G) = 0 already
  CHECK(ctx.vg().dim() == inst.vdim);
  CHECK(ctx.cvg().dim() == 0);

  auto a0 = ctx.a0_compute();
  CHECK(a0.post_verified);
  CHECK(a0.enum_checked);
  CHECK(a0.params == *inst.expected_a0_params);
  CHECK(a0.params.dim() == 1);  // |A0| = 2

  // a(b(a)) = a across the whole family
  for (const auto& z : *inst.A.all_params) {
    if (la::vzero(inst.gr, z)) continue;
    GMat a = inst.A.elem(z);
    auto b = ctx.find_b(a);
    REQUIRE(b.has_value());
    auto back = ctx.find_a(b->mat);
    REQUIRE(back.has_value());
    CHECK(back->mat == a);
  }
  // b(a)^{-1} = b(a^{-1}) on the zero part: G_0 is special. Outside A_0 the
  // identity genuinely fails here (b(alpha_(v,t)) carries (f(v,v)-t)* where
  // the inverse carries t*), so only the A_0 elements are checked.
  {
    GMat a0_elem = inst.A.elem(inst.expected_a0_params->basis()[0]);
    auto b = ctx.find_b(a0_elem);
    auto binv_expect = ctx.find_b(*la::minv(inst.gr, a0_elem));
    REQUIRE(b.has_value());
    REQUIRE(binv_expect.has_value());
    CHECK(*la::minv(inst.gr, b->mat) == binv_expect->mat);
    GVec v1{Rat(1), Rat(0), Rat(0), Rat(1)};  // v = e0, t = w: not in A0
    GMat a = inst.A.elem(v1);
    auto bv = ctx.find_b(a);
    auto bvinv = ctx.find_b(*la::minv(inst.gr, a));
    REQUIRE(bv.has_value());
    REQUIRE(bvinv.has_value());
    CHECK_FALSE(*la::minv(inst.gr, bv->mat) == bvinv->mat);
  }

  // mu swaps the families
  GMat e = inst.A.elem(inst.expected_a0_params->basis()[0]);
  std::string err;
  auto mu = ctx.mu_of(e, &err);
  INFO(err);
  REQUIRE(mu.has_value());
}

TEST_CASE("orth-f2: cubic, defect zero part, isotropic no-solution path") {
  Instance inst = orth_f2();
  RankOneCtx ctx(inst);
  CHECK(ctx.cva() == *inst.expected_cva);
  CHECK(ctx.cvb() == *inst.expected_cvb);
  CHECK(ctx.va() == *inst.expected_va);
  auto verdict = ctx.cubic_verify();
  CHECK(verdict.kind == CubicVerdict::cubic);

  auto a0 = ctx.a0_compute();
  CHECK(a0.post_verified);
  CHECK(a0.enum_checked);
  CHECK(a0.params == *inst.expected_a0_params);

  // the defect transvection has a partner
  GVec e_param{Rat(0), Rat(0), Rat(1)};
  std::string err;
  auto be = ctx.find_b(inst.A.elem(e_param), &err);
  INFO(err);
  CHECK(be.has_value());
  // an isotropic direction (q((1,0,1)) = 0) has no partner in the beta family
  GVec iso{Rat(1), Rat(0), Rat(1)};
  auto none = ctx.find_b(inst.A.elem(iso), &err);
  CHECK_FALSE(none.has_value());
  CHECK(err.find("no family element") != std::string::npos);
}

TEST_CASE("su-quat-q: solver over the rationals") {
  Instance inst = su_quat();
  RankOneCtx ctx(inst);
  CHECK(ctx.cva() == *inst.expected_cva);
  auto verdict = ctx.cubic_verify();
  CHECK(verdict.kind == CubicVerdict::cubic);
  auto a0 = ctx.a0_compute();
  CHECK(a0.post_verified);
  CHECK(a0.params == *inst.expected_a0_params);
  CHECK(a0.params.dim() == 3);

  // solve b(a) for a generator and for a rational combination
  GMat a = inst.A.elem(inst.A.generators[0]);
  std::string err;
  auto res = ctx.find_b(a, &err);
  INFO(err);
  REQUIRE(res.has_value());
  auto back = ctx.find_a(res->mat, &err);
  REQUIRE(back.has_value());
  CHECK(back->mat == a);

  GMat e = inst.A.elem(a0.params.basis()[0]);
  auto mu = ctx.mu_of(e, &err);
  INFO(err);
  REQUIRE(mu.has_value());
}

TEST_CASE("unipotent rational powers") {
  Instance inst = su_quat();
  GMat a = inst.A.elem(inst.A.generators[0]);
  const Ground& g = inst.gr;
  GMat half = unipotent_qpower(g, a, Rat(1, 2));
  CHECK(la::mmul(g, half, half) == a);
  GMat third = unipotent_qpower(g, a, Rat(1, 3));
  CHECK(la::mmul(g, la::mmul(g, third, third), third) == a);
  GMat neg = unipotent_qpower(g, a, Rat(-1));
  CHECK(la::mmul(g, neg, a) == GMat::identity(inst.vdim));
  // roots stay inside the family
  CHECK(inst.A.param_of(half).has_value());
}
