#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rank1/reconstruct.hpp"

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

Instance su3_f9() {
  auto f9 = ScalarDomain::finite_field(3, 2, {Rat(1), Rat(0), Rat(1)});
  auto frob = InvolutionSpec::frobenius(*f9, 3);
  InvolutorySet iset(f9, frob, {f9->one()});
  Scalar x = f9->basis_elem(1);
  // pibar(e0) = x, gram entry x - x* = 2x
  PseudoQuadraticSpace sp(iset, {x}, {{f9->mul_ground(Rat(2), x)}});
  return make_pq_instance(extend_witt1(sp), "su3-f9");
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

void require_pass(const Report& rep, const std::string& id) {
  const CheckRecord* c = rep.find(id);
  INFO("check ", id, c ? (": " + c->detail) : " missing");
  REQUIRE(c != nullptr);
  CHECK(c->status == CheckRecord::pass);
}

Report run_pipeline(const Instance& inst, int samples = 20, unsigned long seed = 5) {
  Report rep;
  rep.scenario = inst.name;
  Pipeline p(inst, PipelineOptions{samples, seed, false}, rep);
  p.run();
  return rep;
}

}  // namespace

TEST_CASE("normal form reduction strips a trivial summand") {
  Instance inst = su3_f4();
  // append one trivial coordinate to every generator
  const Ground g = inst.gr;
  std::vector<GMat> gens;
  for (const auto& z : inst.A.generators) gens.push_back(inst.A.elem(z));
  for (const auto& z : inst.B.generators) gens.push_back(inst.B.elem(z));
  std::vector<GMat> padded;
  for (const auto& mten : gens) {
    GMat p(mten.rows + 1, mten.cols + 1);
    for (int i = 0; i < mten.rows; ++i)
      for (int j = 0; j < mten.cols; ++j) p.at(i, j) = mten.at(i, j);
    p.at(mten.rows, mten.cols) = 1;
    padded.push_back(p);
  }
  NormalFormResult nf = reduce_to_normal_form(g, inst.vdim + 1, padded);
  CHECK_FALSE(nf.already_normal);
  CHECK(nf.w.dim() == inst.vdim);
  CHECK(nf.z.dim() == 1);
  // and the catalog instance itself is already in normal form
  std::vector<GMat> plain;
  for (const auto& z : inst.A.generators) plain.push_back(inst.A.elem(z));
  for (const auto& z : inst.B.generators) plain.push_back(inst.B.elem(z));
  CHECK(reduce_to_normal_form(g, inst.vdim, plain).already_normal);
}

TEST_CASE("pipeline: sl2-f5 quadratic baseline") {
  Report rep = run_pipeline(sl2_f5());
  CHECK(rep.branch == "quadratic-baseline");
  require_pass(rep, "rank1.solver");
  require_pass(rep, "cubic.verdict");
  CHECK(rep.all_pass());
}

TEST_CASE("pipeline: su3-f4 commutative branch") {
  Report rep = run_pipeline(su3_f4());
  CHECK(rep.branch == "commutative");
  for (const char* id :
       {"norm.reduction", "cubic.verdict", "spaces.closed_forms", "a0.params",
        "a0.closed_form", "a0.prop31", "a0.quadratic", "a0.b0_match",
        "rank1.special_zero_part", "mod.characteristic", "decomp.cva_plus_vb",
        "decomp.cva_is_va0", "decomp.va_is_cv_a", "decomp.vaa", "decomp.cvg0_two_ways",
        "decomp.va_split", "rho.mu", "rho.e_unit", "rho.mu_square", "rho.h_n",
        "rho.additive", "rho.cor42b", "rho.cor42a", "rho.hn_power", "ring.j_independent",
        "jordan.closed", "jordan.division", "jordan.hua", "jordan.commutative_class",
        "ring.skewfield", "ring.r_eq_s", "ring.normalizer", "f.biadditive", "f.vs_h",
        "f.kernels", "f.commutator", "f.char2_square", "f.equivariance", "f.in_s",
        "module.kappa_hom", "module.kappa_kernel", "module.section", "module.axioms",
        "module.integer_action", "inv.in_r", "inv.involutory", "inv.antimult",
        "inv.fixes_j", "inv.rho_formula", "inv.conj_formula", "phi.values",
        "phi.biadditive", "phi.shift", "phi.right_kernel", "xw.direct", "xw.invariant",
        "xw.meet", "xw.commutator", "xw.complete", "xw.irreducible",
        "root.centralizer_closure", "root.quotient_closure", "info.mu_unique"}) {
    require_pass(rep, id);
  }
  CHECK(rep.summary.at("dim J") == "1");
  CHECK(rep.summary.at("dim A0 params") == "1");
  CHECK(rep.summary.at("A abelian") == "no");
  CHECK(rep.all_pass());
}

TEST_CASE("pipeline: su3-f9 odd characteristic commutative branch") {
  Report rep = run_pipeline(su3_f9());
  CHECK(rep.branch == "commutative");
  require_pass(rep, "module.divisible");
  require_pass(rep, "f.diag_unit");
  require_pass(rep, "a0.both_kernels");
  CHECK(rep.all_pass());
}

TEST_CASE("pipeline: orth-f2 abelian instance") {
  Report rep = run_pipeline(orth_f2());
  CHECK(rep.branch == "commutative");
  require_pass(rep, "a0.closed_form");
  require_pass(rep, "mod.characteristic");
  require_pass(rep, "jordan.division");
  require_pass(rep, "ring.skewfield");
  const CheckRecord* solver = rep.find("rank1.solver");
  REQUIRE(solver != nullptr);
  CHECK(solver->status == CheckRecord::info);  // partners only on part of A
  CHECK(rep.summary.at("A abelian") == "yes");
  CHECK(rep.all_pass());
}

TEST_CASE("pipeline: su-quat-q noncommutative reconstruction") {
  Report rep = run_pipeline(su_quat(), 24, 3);
  CHECK(rep.branch == "noncommutative");
  for (const char* id :
       {"a0.params", "rho.e_unit", "rho.mu_square", "ring.j_independent", "jordan.closed",
        "jordan.division", "jordan.commutative_class", "ring.r_eq_s", "ring.skewfield",
        "ring.normalizer", "f.vs_h", "f.kernels", "f.commutator", "f.equivariance",
        "module.well_defined", "module.axioms", "module.divisible", "f.diag_unit",
        "inv.in_r", "inv.well_defined", "inv.involutory", "inv.antimult", "inv.fixes_j",
        "inv.rho_formula", "inv.conj_formula", "inv.rho_minus_mu", "inv.f_skew",
        "inv.j_fixed_space", "inv.sesquilinear", "phi.values", "phi.shift",
        "phi.semilinear", "phi.nondegenerate", "phi.bijective", "pi_abar.well_defined",
        "pi_abar.scalar", "pi_abar.additive", "pi_abar.anisotropic", "pi_abar.fbb",
        "coord.dim_one", "coord.unique", "coord.mu_action", "coord.b_action",
        "coord.scalar_commutes", "coord.bracket_scalar", "su.pi_invariant",
        "su.witt_index_one", "su.parametrization", "su.r_identified",
        "su.involution_match", "su.roundtrip_laws", "su.roundtrip_action"}) {
    require_pass(rep, id);
  }
  CHECK(rep.summary.at("dim J") == "3");
  CHECK(rep.summary.at("dim R") == "4");
  CHECK(rep.summary.at("R = S") == "yes");
  CHECK(rep.summary.at("witt index") == "1");
  CHECK(rep.all_pass());
}

TEST_CASE("pipeline: doubled su3-f4 splits") {
  Instance dbl = double_instance(su3_f4(), "doubled-su3-f4");
  Report rep = run_pipeline(dbl);
  require_pass(rep, "xw.two_summands");
  require_pass(rep, "xw.reentry");
  require_pass(rep, "xw.complete");
  CHECK(rep.summary.at("summand branch") == "commutative");
  CHECK(rep.all_pass());
}
