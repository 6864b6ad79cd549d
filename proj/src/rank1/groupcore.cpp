#include "rank1/groupcore.hpp"

#include <cassert>

namespace rank1 {

la::Subspace fixed_space(const Ground& g, int vdim, const std::vector<GMat>& gens) {
  la::Subspace acc = la::Subspace::full(g, vdim);
  for (const auto& m : gens) {
    GMat n = la::msub(g, m, GMat::identity(vdim));
    acc = la::intersect(g, acc, la::left_kernel(g, n));
  }
  return acc;
}

la::Subspace commutator_space(const Ground& g, const la::Subspace& w,
                              const std::vector<GMat>& gens) {
  int vdim = w.ambient();
  std::vector<GMat> nms;
  for (const auto& m : gens) nms.push_back(la::msub(g, m, GMat::identity(vdim)));
  std::vector<GVec> rows;
  for (const auto& b : w.basis())
    for (const auto& n : nms) rows.push_back(la::apply(g, b, n));
  la::Subspace acc(g, vdim, rows);
  for (;;) {
    std::vector<GVec> more = acc.basis();
    for (const auto& b : acc.basis())
      for (const auto& n : nms) more.push_back(la::apply(g, b, n));
    la::Subspace next(g, vdim, more);
    if (next == acc) return acc;
    acc = next;
  }
}

la::Subspace invariant_closure(const Ground& g, const la::Subspace& u,
                               const std::vector<GMat>& gens) {
  std::vector<GMat> all = gens;
  for (const auto& m : gens) {
    auto inv = la::minv(g, m);
    assert(inv);
    all.push_back(*inv);
  }
  la::Subspace acc = u;
  for (;;) {
    std::vector<GVec> more = acc.basis();
    for (const auto& b : acc.basis())
      for (const auto& m : all) more.push_back(la::apply(g, b, m));
    la::Subspace next(g, u.ambient(), more);
    if (next == acc) return acc;
    acc = next;
  }
}

la::Subspace centralizer_quotient(const Ground& g, int vdim, const std::vector<GMat>& gens,
                                  const la::Subspace& u) {
  la::Subspace acc = la::Subspace::full(g, vdim);
  for (const auto& m : gens) {
    GMat n = la::msub(g, m, GMat::identity(vdim));
    acc = la::intersect(g, acc, la::preimage(g, n, u));
  }
  return acc;
}

GMat unipotent_qpower(const Ground& g, const GMat& m, const Rat& q) {
  int vdim = m.rows;
  GMat n = la::msub(g, m, GMat::identity(vdim));
  GMat n2 = la::mmul(g, n, n);
  if (!la::mzero(g, la::mmul(g, n2, n))) throw DomainError("element is not cubically unipotent");
  if (g.p != 0) {
    if (denominator(q) != 1) throw DomainError("modular exponents must be integers");
    Int e = numerator(q) % g.p;
    if (e < 0) e += g.p;
    return la::mpow(g, m, static_cast<long>(e));
  }
  // (1+n)^q = 1 + q n + q(q-1)/2 n^2 in the divisible closure
  GMat out = GMat::identity(vdim);
  out = la::madd(g, out, la::mscale(g, q, n));
  out = la::madd(g, out, la::mscale(g, q * (q - 1) / 2, n2));
  return out;
}

namespace {

std::vector<GMat> family_gen_mats(const RootFamily& f) {
  std::vector<GMat> out;
  for (const auto& z : f.generators) out.push_back(f.elem(z));
  return out;
}

}  // namespace

RankOneCtx::RankOneCtx(const Instance& inst)
    : inst_(&inst),
      g_(inst.gr),
      agens_(family_gen_mats(inst.A)),
      bgens_(family_gen_mats(inst.B)) {
  cva_ = fixed_space(g_, inst.vdim, agens_);
  cvb_ = fixed_space(g_, inst.vdim, bgens_);
  va_ = commutator_space(g_, la::Subspace::full(g_, inst.vdim), agens_);
  vb_ = commutator_space(g_, la::Subspace::full(g_, inst.vdim), bgens_);
}

la::Subspace RankOneCtx::cvg() const {
  std::vector<GMat> all = agens_;
  for (const auto& m : bgens_) all.push_back(m);
  return fixed_space(g_, inst_->vdim, all);
}

la::Subspace RankOneCtx::vg() const {
  std::vector<GMat> all = agens_;
  for (const auto& m : bgens_) all.push_back(m);
  return commutator_space(g_, la::Subspace::full(g_, inst_->vdim), all);
}

CubicVerdict RankOneCtx::cubic_verify() const {
  CubicVerdict out;
  la::Subspace vaa = commutator_space(g_, va_, agens_);
  la::Subspace vaaa = commutator_space(g_, vaa, agens_);
  out.vaa_dim = vaa.dim();
  if (vaaa.dim() != 0) {
    out.kind = CubicVerdict::not_cubic;
    out.witness = "[V,A,A,A] has dimension " + std::to_string(vaaa.dim());
    return out;
  }
  // commutator chain [V,G,G,G] over the combined generating set
  std::vector<GMat> all = agens_;
  for (const auto& m : bgens_) all.push_back(m);
  la::Subspace u = commutator_space(g_, la::Subspace::full(g_, inst_->vdim), all);
  u = commutator_space(g_, u, all);
  la::Subspace vggg = commutator_space(g_, u, all);
  out.vggg_dim = vggg.dim();
  if (vggg.dim() == 0) {
    out.kind = out.vaa_dim == 0 ? CubicVerdict::quadratic : CubicVerdict::not_cubic;
    if (out.kind == CubicVerdict::not_cubic) out.witness = "[V,G,G,G] = 0 but [V,A,A] != 0";
    return out;
  }
  if (out.vaa_dim == 0) {
    out.kind = CubicVerdict::quadratic;
    return out;
  }
  out.kind = CubicVerdict::cubic;
  // witness: a triple of generators with v(g1-1)(g2-1)(g3-1) != 0
  for (size_t i = 0; i < all.size() && out.witness.empty(); ++i)
    for (size_t j = 0; j < all.size() && out.witness.empty(); ++j)
      for (size_t k = 0; k < all.size() && out.witness.empty(); ++k) {
        GMat n1 = la::msub(g_, all[i], GMat::identity(inst_->vdim));
        GMat prod = la::mmul(g_, la::mmul(g_, n1,
                                          la::msub(g_, all[j], GMat::identity(inst_->vdim))),
                             la::msub(g_, all[k], GMat::identity(inst_->vdim)));
        if (!la::mzero(g_, prod)) {
          size_t na = inst_->A.generators.size();
          auto name = [&](size_t t) {
            return t < na ? inst_->A.describe(inst_->A.generators[t])
                          : inst_->B.describe(inst_->B.generators[t - na]);
          };
          out.witness = "commutator chain through " + name(i) + ", " + name(j) + ", " + name(k);
        }
      }
  return out;
}

std::optional<RankOneCtx::FindResult> RankOneCtx::solve_point(const RootFamily& fam,
                                                              const la::Subspace& from,
                                                              const la::Subspace& target,
                                                              std::string* err) const {
  auto fail = [&](const std::string& m) {
    if (err) *err = m;
    return std::nullopt;
  };
  if (fam.all_params) {
    std::optional<FindResult> found;
    for (const auto& z : *fam.all_params) {
      if (la::vzero(g_, z)) continue;
      GMat cand = fam.elem(z);
      if (la::image(g_, from, cand) == target) {
        if (found) return fail("solution in the family is not unique");
        found = FindResult{z, cand};
      }
    }
    if (!found) return fail("no family element maps the base point to the target");
    return found;
  }
  if (!fam.linear) return fail("infinite nonlinear families are not solvable");
  // rows of `from` must land in `target`: w + w N(z) in target
  GMat rt = target.residual_matrix(g_);
  int rows = from.dim() * inst_->vdim;
  GMat sys(fam.pdim, rows);
  GVec rhs(static_cast<size_t>(rows));
  for (int wi = 0; wi < from.dim(); ++wi) {
    const GVec& w = from.basis()[static_cast<size_t>(wi)];
    GVec wred = la::apply(g_, w, rt);
    for (int c = 0; c < inst_->vdim; ++c)
      rhs[static_cast<size_t>(wi * inst_->vdim + c)] = g_.neg(wred[static_cast<size_t>(c)]);
    for (int l = 0; l < fam.pdim; ++l) {
      GVec img = la::apply(g_, la::apply(g_, w, fam.nmats[static_cast<size_t>(l)]), rt);
      for (int c = 0; c < inst_->vdim; ++c)
        sys.at(l, wi * inst_->vdim + c) = img[static_cast<size_t>(c)];
    }
  }
  auto sol = la::solve_right(g_, sys, rhs);
  if (!sol) return fail("no family element maps the base point to the target");
  GVec z = sol->particular;
  for (const auto& k : sol->kernel.basis()) {
    GMat nk = fam.nlin(g_, k);
    if (!la::mzero(g_, nk)) {
      // a genuinely free direction: the solution is not unique
      return fail("solution in the family is not unique");
    }
  }
  if (!fam.admissible(z)) return fail("solved parameters violate the membership constraint");
  GMat cand = fam.elem(z);
  if (!(la::image(g_, from, cand) == target))
    return fail("candidate does not map the base point onto the target");
  return FindResult{z, cand};
}

bool RankOneCtx::conjugation_ok(const GMat& a, const GMat& b, std::string* err) const {
  auto ainv = la::minv(g_, a);
  auto binv = la::minv(g_, b);
  if (!ainv || !binv) {
    if (err) *err = "element not invertible";
    return false;
  }
  // B^a = A^b: conjugates of B-generators by a must lie in A^b and
  // conjugates of A-generators by b must lie in B^a
  for (const auto& beta : bgens_) {
    GMat conj = la::mmul(g_, la::mmul(g_, *ainv, beta), a);
    GMat back = la::mmul(g_, la::mmul(g_, b, conj), *binv);
    if (!inst_->A.param_of(back)) {
      if (err) *err = "conjugate of a B-generator leaves A^b";
      return false;
    }
  }
  for (const auto& alpha : agens_) {
    GMat conj = la::mmul(g_, la::mmul(g_, *binv, alpha), b);
    GMat back = la::mmul(g_, la::mmul(g_, a, conj), *ainv);
    if (!inst_->B.param_of(back)) {
      if (err) *err = "conjugate of an A-generator leaves B^a";
      return false;
    }
  }
  return true;
}

std::optional<RankOneCtx::FindResult> RankOneCtx::find_b(const GMat& a, std::string* err) const {
  if (a == GMat::identity(inst_->vdim)) {
    if (err) *err = "b(a) requires a != 1";
    return std::nullopt;
  }
  la::Subspace target = la::image(g_, cvb_, a);
  auto res = solve_point(inst_->B, cva_, target, err);
  if (!res) return std::nullopt;
  if (!conjugation_ok(a, res->mat, err)) return std::nullopt;
  return res;
}

std::optional<RankOneCtx::FindResult> RankOneCtx::find_a(const GMat& b, std::string* err) const {
  if (b == GMat::identity(inst_->vdim)) {
    if (err) *err = "a(b) requires b != 1";
    return std::nullopt;
  }
  la::Subspace target = la::image(g_, cva_, b);
  auto res = solve_point(inst_->A, cvb_, target, err);
  if (!res) return std::nullopt;
  if (!conjugation_ok(res->mat, b, err)) return std::nullopt;
  return res;
}

std::optional<GMat> RankOneCtx::mu_of(const GMat& a, std::string* err) const {
  auto ainv = la::minv(g_, a);
  if (!ainv) {
    if (err) *err = "element not invertible";
    return std::nullopt;
  }
  auto b_of_ainv = find_b(*ainv, err);
  if (!b_of_ainv) return std::nullopt;
  auto b_of_a = find_b(a, err);
  if (!b_of_a) return std::nullopt;
  auto binv = la::minv(g_, b_of_a->mat);
  GMat mu = la::mmul(g_, la::mmul(g_, b_of_ainv->mat, a), *binv);
  // mu swaps the families
  auto muinv = la::minv(g_, mu);
  if (!muinv) {
    if (err) *err = "mu not invertible";
    return std::nullopt;
  }
  for (const auto& alpha : agens_) {
    GMat conj = la::mmul(g_, la::mmul(g_, *muinv, alpha), mu);
    if (!inst_->B.param_of(conj)) {
      if (err) *err = "A^mu is not contained in B";
      return std::nullopt;
    }
  }
  for (const auto& beta : bgens_) {
    GMat conj = la::mmul(g_, la::mmul(g_, *muinv, beta), mu);
    if (!inst_->A.param_of(conj)) {
      if (err) *err = "B^mu is not contained in A";
      return std::nullopt;
    }
  }
  return mu;
}

RankOneCtx::A0Result RankOneCtx::zero_part(const RootFamily& fam, const la::Subspace& cv_own,
                                           const la::Subspace& comm_own) const {
  A0Result out;
  // linear conditions on N(z): V N(z) inside C_V(F) and [V,F] N(z) = 0
  std::vector<GVec> conds;  // rows indexed by param coordinates
  GMat rc = cv_own.residual_matrix(g_);
  int cols = inst_->vdim * inst_->vdim + comm_own.dim() * inst_->vdim;
  GMat sys(fam.pdim, cols);
  for (int l = 0; l < fam.pdim; ++l) {
    const GMat& n = fam.nmats[static_cast<size_t>(l)];
    GMat vn = la::mmul(g_, n, rc);  // rows: e_i N(z) reduced mod C_V
    int c = 0;
    for (const auto& x : vn.a) sys.at(l, c++) = x;
    for (int wi = 0; wi < comm_own.dim(); ++wi) {
      GVec img = la::apply(g_, comm_own.basis()[static_cast<size_t>(wi)], n);
      for (const auto& x : img) sys.at(l, c++) = x;
    }
  }
  la::Subspace sol = la::left_kernel(g_, sys);
  sol = la::intersect(g_, sol, fam.param_span);
  // admissible part of the solution space: greedy span over a pool of
  // candidate members, each verified on the actual family element
  auto element_ok = [&](const GVec& z) {
    if (!fam.admissible(z)) return false;
    GMat n = la::msub(g_, fam.elem(z), GMat::identity(inst_->vdim));
    for (int i = 0; i < inst_->vdim; ++i)
      if (!cv_own.contains(g_, la::apply(g_, la::unit_vec(inst_->vdim, i), n))) return false;
    for (const auto& w : comm_own.basis())
      if (!la::vzero(g_, la::apply(g_, w, n))) return false;
    return true;
  };
  std::vector<GVec> pool = sol.basis();
  for (int i = 0; i < sol.dim(); ++i)
    for (int k = i + 1; k < sol.dim(); ++k)
      pool.push_back(la::vadd(g_, sol.basis()[static_cast<size_t>(i)],
                              sol.basis()[static_cast<size_t>(k)]));
  for (const auto& z : fam.generators)
    if (sol.contains(g_, z)) pool.push_back(z);
  if (fam.all_params)
    for (const auto& z : *fam.all_params)
      if (sol.contains(g_, z)) pool.push_back(z);
  std::vector<GVec> good;
  la::Subspace acc = la::Subspace::zero(fam.pdim);
  for (const auto& z : pool) {
    if (acc.contains(g_, z)) continue;
    if (!element_ok(z)) continue;
    good.push_back(z);
    std::vector<GVec> b = acc.basis();
    b.push_back(z);
    acc = la::Subspace(g_, fam.pdim, b);
  }
  out.params = acc;
  out.post_verified = true;
  for (const auto& z : out.params.basis())
    if (!element_ok(z)) {
      out.post_verified = false;
      out.note = "a basis direction of the solved space fails the element-level conditions";
    }
  if (fam.all_params) {
    // exhaustive cross-check
    int count = 0;
    bool all_in = true;
    for (const auto& z : *fam.all_params) {
      GMat m = fam.elem(z);
      GMat n = la::msub(g_, m, GMat::identity(inst_->vdim));
      bool ok = true;
      for (int i = 0; i < inst_->vdim && ok; ++i)
        if (!cv_own.contains(g_, la::apply(g_, la::unit_vec(inst_->vdim, i), n))) ok = false;
      for (const auto& w : comm_own.basis())
        if (!la::vzero(g_, la::apply(g_, w, n))) ok = false;
      if (ok) {
        ++count;
        if (!out.params.contains(g_, z)) all_in = false;
      }
    }
    std::int64_t expect = 1;
    for (int i = 0; i < out.params.dim(); ++i) expect *= g_.p;
    out.enum_checked = all_in && (count == expect);
    if (!out.enum_checked)
      out.note = "enumeration found " + std::to_string(count) + " elements, solver predicts " +
                 std::to_string(expect);
  }
  return out;
}

RankOneCtx::A0Result RankOneCtx::a0_compute() const { return zero_part(inst_->A, cva_, va_); }
RankOneCtx::A0Result RankOneCtx::b0_compute() const { return zero_part(inst_->B, cvb_, vb_); }

}  // namespace rank1
