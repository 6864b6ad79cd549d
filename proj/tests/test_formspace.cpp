#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rank1/formspace.hpp"

using namespace rank1;

namespace {

PseudoQuadraticSpace su3_f4_space() {
  auto f4 = ScalarDomain::finite_field(2, 2, {Rat(1), Rat(1), Rat(1)});
  auto frob = InvolutionSpec::frobenius(*f4, 2);
  InvolutorySet iset(f4, frob, {f4->one()});
  Scalar w = f4->basis_elem(1);
  return PseudoQuadraticSpace(iset, {w}, {{f4->one()}});
}

PseudoQuadraticSpace quat_space() {
  auto h = ScalarDomain::quaternion(Rat(-1), Rat(-1));
  auto tw = InvolutionSpec::quat_twisted(*h, h->basis_elem(1));
  InvolutorySet iset(h, tw, {h->one(), h->basis_elem(2), h->basis_elem(3)});
  Scalar i = h->basis_elem(1);
  Scalar two_i = h->mul_ground(Rat(2), i);
  return PseudoQuadraticSpace(iset, {i}, {{two_i}});
}

QuadraticSpace orth_f2_space() {
  auto f2 = ScalarDomain::finite_field(2, 1, {Rat(0), Rat(1)});
  Scalar one = f2->one(), zero = f2->zero();
  // q(x,y,z) = x^2 + xy + y^2 + z^2
  return QuadraticSpace(f2, {one, one, one},
                        {{zero, one, zero}, {one, zero, zero}, {zero, zero, zero}});
}

}  // namespace

TEST_CASE("pq evaluation in the F4 instance") {
  PseudoQuadraticSpace sp = su3_f4_space();
  const ScalarDomain& K = sp.dom();
  Scalar w = K.basis_elem(1);
  // pibar(1) = w mod F2
  CHECK(sp.pq_eval({K.one()}) == w);
  // pibar(0) = 0
  CHECK(K.is_zero(sp.pq_eval({K.zero()})));
  // rad f = 0 since f(e0,e0) = 1
  CHECK(sp.rad_f().dim() == 0);
  auto res = pq_is_anisotropic(sp);
  CHECK(res.anisotropic);
  CHECK(res.mode == CheckMode::exhaustive);
}

TEST_CASE("pq evaluation in the quaternion instance") {
  PseudoQuadraticSpace sp = quat_space();
  const ScalarDomain& K = sp.dom();
  Scalar i = K.basis_elem(1), j = K.basis_elem(2);
  // pibar(j) = j* i j = j i j = i mod K0
  CHECK(sp.pq_eval({j}) == i);
  CHECK(sp.rad_f().dim() == 0);
  auto res = pq_is_anisotropic(sp);
  CHECK(res.anisotropic);
  CHECK(res.mode == CheckMode::certificate);
}

TEST_CASE("isotropic input is rejected with a witness") {
  auto f4 = ScalarDomain::finite_field(2, 2, {Rat(1), Rat(1), Rat(1)});
  auto frob = InvolutionSpec::frobenius(*f4, 2);
  InvolutorySet iset(f4, frob, {f4->one()});
  // pibar(x) = x* x has value 1 = N(1) inside K0
  PseudoQuadraticSpace bad(iset, {f4->one()}, {{f4->zero()}});
  CHECK_THROWS_AS(extend_witt1(bad), DomainError);
}

TEST_CASE("su3-f4 instance data") {
  auto ext = extend_witt1(su3_f4_space());
  Instance inst = make_pq_instance(ext, "su3-f4");
  CHECK(inst.vdim == 6);
  CHECK(inst.expected_A_order == 8);
  REQUIRE(inst.A.all_params.has_value());
  CHECK(inst.A.all_params->size() == 8);
  // alpha_(0,0) is the identity
  CHECK(inst.A.elem(la::zero_vec(inst.A.pdim)) == GMat::identity(6));
  // isotropic line count = 1 + |K0| * |Vbar| = 9
  auto lines = ext->all_lines();
  CHECK(lines.size() == 21);
  int iso = 0;
  for (const auto& rep : lines)
    if (ext->line_isotropic(rep)) ++iso;
  CHECK(iso == 9);
  for (const auto& c : run_form_checks(inst, 16, 7)) {
    INFO(c.id, ": ", c.detail);
    CHECK(c.pass);
  }
}

TEST_CASE("su-quat-q instance data") {
  auto ext = extend_witt1(quat_space());
  Instance inst = make_pq_instance(ext, "su-quat-q");
  CHECK(inst.vdim == 12);
  CHECK(inst.A.pdim == 8);
  CHECK(inst.A.param_span.dim() == 8);
  REQUIRE(inst.expected_a0_params.has_value());
  CHECK(inst.expected_a0_params->dim() == 3);
  for (const auto& c : run_form_checks(inst, 14, 7)) {
    INFO(c.id, ": ", c.detail);
    CHECK(c.pass);
  }
}

TEST_CASE("orth-f2 instance data") {
  auto orth = orth_build(orth_f2_space());
  CHECK(orth->defect.dim() == 1);
  CHECK(orth->defect.basis()[0] == GVec{Rat(0), Rat(0), Rat(1)});
  CHECK(orth->iset.k0.dim() == 1);
  CHECK(orth->form_into_quotient);
  Instance inst = make_orth_instance(orth, "orth-f2");
  CHECK(inst.vdim == 4);
  CHECK(inst.expected_A_order == 8);
  CHECK(inst.expected_a0_params->dim() == 1);
  for (const auto& c : run_form_checks(inst, 16, 7)) {
    INFO(c.id, ": ", c.detail);
    CHECK(c.pass);
  }
}

TEST_CASE("orth rejects isotropic nondefective forms") {
  auto f3 = ScalarDomain::finite_field(3, 1, {Rat(0), Rat(1)});
  Scalar one = f3->one(), zero = f3->zero(), two = f3->from_int(2);
  // q(x,y) = xy is isotropic with trivial radical
  QuadraticSpace hyp(f3, {zero, zero}, {{zero, one}, {one, zero}});
  CHECK_THROWS_AS(orth_build(hyp), DomainError);
  // q(x) = x^2 + y^2 over F_3 is anisotropic (2 not a square mod 3)
  QuadraticSpace good(f3, {one, one}, {{two, zero}, {zero, two}});
  CHECK(orth_build(good)->defect.dim() == 0);
}

TEST_CASE("sl2 instance over F5") {
  auto f5 = ScalarDomain::finite_field(5, 1, {Rat(0), Rat(1)});
  MatrixRing r5{f5, 1};
  JordanSubspace j(r5, {r5.identity()});
  Instance inst = sl2jr_build(j, "sl2-f5");
  CHECK(inst.vdim == 2);
  CHECK(inst.expected_A_order == 5);
  // lower unipotent with parameter 1 acts as (v1, v2) -> (v1 + v2, v2)
  GMat m = inst.A.elem({Rat(1)});
  GVec img = la::apply(inst.gr, GVec{Rat(0), Rat(1)}, m);
  CHECK(img == GVec{Rat(1), Rat(1)});
  // expected fixed space of A = first coordinate line
  CHECK(inst.expected_cva->contains(inst.gr, GVec{Rat(1), Rat(0)}));
  CHECK(inst.expected_cva->dim() == 1);
  for (const auto& c : run_form_checks(inst, 10, 3)) {
    INFO(c.id, ": ", c.detail);
    CHECK(c.pass);
  }
}

TEST_CASE("doubled instance") {
  auto ext = extend_witt1(su3_f4_space());
  Instance inst = make_pq_instance(ext, "su3-f4");
  Instance dbl = double_instance(inst, "doubled-su3-f4");
  CHECK(dbl.vdim == 12);
  CHECK(dbl.expected_cva->dim() == 4);
  for (const auto& c : run_form_checks(dbl, 10, 3)) {
    INFO(c.id, ": ", c.detail);
    CHECK(c.pass);
  }
}

TEST_CASE("transvection matrices respect the membership constraint") {
  auto ext = extend_witt1(su3_f4_space());
  const ScalarDomain& K = ext->base.dom();
  Scalar w = K.basis_elem(1);
  // pibar(e0) = w, so t must lie in w + F2
  CHECK_NOTHROW(ext->alpha({K.one()}, w));
  CHECK_NOTHROW(ext->alpha({K.one()}, K.add(w, K.one())));
  CHECK_THROWS_AS(ext->alpha({K.one()}, K.one()), DomainError);
}
