#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rank1/jordan.hpp"

using namespace rank1;

namespace {

MatrixRing scalar_ring(std::shared_ptr<const ScalarDomain> d) { return MatrixRing{std::move(d), 1}; }

KMat wrap(const MatrixRing& r, const Scalar& s) { return r.from_scalar(s); }

}  // namespace

TEST_CASE("q operator basics") {
  auto f4 = ScalarDomain::finite_field(2, 2, {Rat(1), Rat(1), Rat(1)});
  MatrixRing r4 = scalar_ring(f4);
  Scalar w = f4->basis_elem(1);
  // Q_1(b) = b
  CHECK(km_eq(q_operator(r4.identity(), wrap(r4, w)), wrap(r4, w)));
  // Q_w(1) = w^2
  CHECK(km_eq(q_operator(wrap(r4, w), r4.identity()), wrap(r4, f4->mul(w, w))));

  auto h = ScalarDomain::quaternion(Rat(-1), Rat(-1));
  MatrixRing rh = scalar_ring(h);
  Scalar j = h->basis_elem(2), k = h->basis_elem(3);
  // Q_j(k) = j k j = k
  CHECK(km_eq(q_operator(wrap(rh, j), wrap(rh, k)), wrap(rh, k)));
}

TEST_CASE("jordan closure: catalog positives") {
  auto f4 = ScalarDomain::finite_field(2, 2, {Rat(1), Rat(1), Rat(1)});
  MatrixRing r4 = scalar_ring(f4);
  JordanSubspace f2_in_f4(r4, {r4.identity()});
  CHECK(is_jordan_closed(f2_in_f4).ok);
  CHECK(is_division_jordan(f2_in_f4).ok);
  CHECK(hua_closure_check(f2_in_f4).ok);
  CHECK(classify_commutative(f2_in_f4).commutative);
  CHECK(classify_commutative(f2_in_f4).q_agrees);

  auto h = ScalarDomain::quaternion(Rat(-1), Rat(-1));
  MatrixRing rh = scalar_ring(h);
  JordanSubspace hj(rh, {rh.identity(), wrap(rh, h->basis_elem(2)), wrap(rh, h->basis_elem(3))});
  CHECK(is_jordan_closed(hj).ok);
  auto div = is_division_jordan(hj);
  CHECK(div.ok);
  CHECK(div.mode == CheckMode::certificate);
  CHECK(hua_closure_check(hj).ok);
  auto cls = classify_commutative(hj);
  CHECK_FALSE(cls.commutative);
  CHECK(cls.q_agrees);
}

TEST_CASE("jordan closure: nilpotent counterexample") {
  // F_3[x]/(x^3) via the 3x3 shift matrix
  auto f3 = ScalarDomain::finite_field(3, 1, {Rat(0), Rat(1)});
  MatrixRing r3{f3, 3};
  KMat shift = r3.zero();
  shift.at(0, 1) = f3->one();
  shift.at(1, 2) = f3->one();
  JordanSubspace j(r3, {r3.identity(), shift});
  auto closed = is_jordan_closed(j);
  CHECK_FALSE(closed.ok);
  REQUIRE(closed.witness.has_value());
  // witness value is x^2
  KMat x2 = km_mul(shift, shift);
  CHECK(km_eq(closed.witness->value, x2));
  CHECK_FALSE(is_division_jordan(j).ok);
  CHECK_FALSE(hua_closure_check(j).ok);
}

TEST_CASE("ample involutory sets") {
  auto f4 = ScalarDomain::finite_field(2, 2, {Rat(1), Rat(1), Rat(1)});
  auto frob = InvolutionSpec::frobenius(*f4, 2);
  InvolutorySet s4(f4, frob, {f4->one()});
  CHECK(is_ample(s4).ok);
  CHECK(is_ample(s4).mode == CheckMode::exhaustive);

  auto h = ScalarDomain::quaternion(Rat(-1), Rat(-1));
  auto tw = InvolutionSpec::quat_twisted(*h, h->basis_elem(1));
  InvolutorySet sh(h, tw, {h->one(), h->basis_elem(2), h->basis_elem(3)});
  CHECK(is_ample(sh).ok);

  InvolutorySet bad(h, tw, {h->one()});
  auto res = is_ample(bad);
  CHECK_FALSE(res.ok);
  CHECK(res.witness.find("trace") != std::string::npos);
}

TEST_CASE("k0 coset reduction") {
  auto f4 = ScalarDomain::finite_field(2, 2, {Rat(1), Rat(1), Rat(1)});
  auto frob = InvolutionSpec::frobenius(*f4, 2);
  InvolutorySet s(f4, frob, {f4->one()});
  Scalar w = f4->basis_elem(1);
  Scalar w1 = f4->add(w, f4->one());
  CHECK(s.k0_reduce(w) == s.k0_reduce(w1));  // differ by 1 in K0
  CHECK_FALSE(s.k0_contains(w));
  CHECK(s.k0_contains(f4->one()));
}

TEST_CASE("ideal lemma branches") {
  // R = F_2 inside F_4, x = w: (w+1)^{-1} = w not in R, ideal = 0
  auto f4 = ScalarDomain::finite_field(2, 2, {Rat(1), Rat(1), Rat(1)});
  MatrixRing r4 = scalar_ring(f4);
  SubRing f2(r4, {r4.identity()});
  auto res = ideal_lemma_check(f2, wrap(r4, f4->basis_elem(1)));
  CHECK(res.branch == IdealLemmaBranch::proper_ideal);
  CHECK(res.ideal_dim == 0);

  // R = S = F_5, any unit x with x+1 a unit: first branch
  auto f5 = ScalarDomain::finite_field(5, 1, {Rat(0), Rat(1)});
  MatrixRing r5 = scalar_ring(f5);
  SubRing whole(r5, {r5.identity()});
  auto res5 = ideal_lemma_check(whole, wrap(r5, f5->from_int(2)));
  CHECK(res5.branch == IdealLemmaBranch::inverse_in_subring);

  // R = diagonal matrices in M_2(F_3), x = diag(1,2): x+1 is singular
  auto f3 = ScalarDomain::finite_field(3, 1, {Rat(0), Rat(1)});
  MatrixRing r23{f3, 2};
  KMat d10 = r23.zero(), d01 = r23.zero();
  d10.at(0, 0) = f3->one();
  d01.at(1, 1) = f3->one();
  SubRing diag(r23, {d10, d01});
  KMat x = r23.zero();
  x.at(0, 0) = f3->one();
  x.at(1, 1) = f3->from_int(2);
  auto res3 = ideal_lemma_check(diag, x);
  CHECK(res3.branch == IdealLemmaBranch::hypothesis_fails);

  // R = F_3 inside F_3[t]/(t^2) (t nilpotent 2x2), x = 1+t: second branch
  KMat t = r23.zero();
  t.at(0, 1) = f3->one();
  SubRing consts(r23, {r23.identity()});
  KMat x1t = km_add(r23.identity(), t);
  auto resn = ideal_lemma_check(consts, x1t);
  CHECK(resn.branch == IdealLemmaBranch::proper_ideal);
  CHECK(resn.ideal_dim == 0);
}
