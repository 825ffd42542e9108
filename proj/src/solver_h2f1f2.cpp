// Different unknown focal lengths, no distortion, two correspondences.
//
// The two w-free rows stack into C(s) [f1 1]^T = 0; det C(s) is a quartic.
// w = 1/f2 then follows linearly from a remaining row of the first
// correspondence, and the second correspondence's remaining row is spare.

#include "solver_common.hpp"

namespace gravpano {

namespace {

// Picks the skew row whose w coefficient is largest at (s, f1).
detail::SkewRowValue best_w_row(const ConstraintRows& rows, double s, double f1) {
  const auto r0 = detail::eval_skew_row(rows.rows[0], s, f1, 0.0);
  const auto r1 = detail::eval_skew_row(rows.rows[1], s, f1, 0.0);
  return std::abs(r0.w_coeff) >= std::abs(r1.w_coeff) ? r0 : r1;
}

}  // namespace

namespace elimination {
PolyMat h2f1f2_matrix(const Correspondence& c1, const Correspondence& c2) {
  PolyMat C(2);
  int r = 0;
  for (const Correspondence* c : {&c1, &c2}) {
    const ConstraintRows rows = expand_constraints(*c, ExpansionMode::kZeroDistortion);
    C.at(r, 0) = detail::row_poly(rows.b, FTerm::kF);
    C.at(r, 1) = detail::row_poly(rows.b, FTerm::kOne);
    ++r;
  }
  return C;
}
}  // namespace elimination

SolverCandidateSet solve_h2f1f2(const Correspondence& c1, const Correspondence& c2,
                                const SolverOptions& opts) {
  const ConstraintRows rows1 = expand_constraints(c1, ExpansionMode::kZeroDistortion);
  const ConstraintRows rows2 = expand_constraints(c2, ExpansionMode::kZeroDistortion);
  const PolyMat C = elimination::h2f1f2_matrix(c1, c2);
  const UniPoly det = polymat_det(C);
  const double scale = detail::row9_norm(rows1.b) * detail::row9_norm(rows2.b);
  detail::require_nondegenerate(det, scale, "H2f1f2: C(s) is singular for every s");
  const std::vector<double> roots = solve_quartic(det.trimmed());

  SolverCandidateSet out;
  out.solver_id = SolverId::kH2f1f2;
  out.raw_count = static_cast<int>(roots.size());

  const double ns = c1.p1.norm_scale;
  const Correspondence cs[2] = {c1, c2};
  struct Ranked {
    StitchModel model;
    double residual;
    double spare;
  };
  std::vector<Ranked> ranked;
  for (double s : roots) {
    NullVector nv;
    try {
      nv = polymat_nullvector(C, s);
    } catch (const NoNullspace&) {
      continue;
    }
    if (nv.rank0) {
      throw DegenerateConfiguration("H2f1f2: C(s) vanishes at a root; focal is undetermined");
    }
    if (std::abs(nv.v(1)) < 1e-12) continue;
    const double f1 = nv.v(0) / nv.v(1);
    if (!(f1 > 0.0)) continue;
    const auto wr = best_w_row(rows1, s, f1);
    if (wr.w_coeff == 0.0) continue;
    const double w = -wr.constant / wr.w_coeff;
    if (!(w > 0.0)) continue;
    const auto sp = best_w_row(rows2, s, f1);
    const double spare_scale = std::abs(w * sp.w_coeff) + std::abs(sp.constant);
    const double spare =
        spare_scale > 0.0 ? std::abs(w * sp.w_coeff + sp.constant) / spare_scale : 0.0;
    if (opts.noise_free && spare > 1e-6) continue;
    const detail::NormParams p{s, f1, 1.0 / w, 0.0, 0.0};
    SolverCandidateSet tmp;
    if (detail::add_candidate(tmp, p, ns, cs, detail::used_residual({&rows1}, {&rows2}, p))) {
      ranked.push_back({tmp.candidates.front(), tmp.residuals.front(), spare});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.spare < b.spare; });
  for (auto& r : ranked) {
    out.candidates.push_back(r.model);
    out.residuals.push_back(r.residual);
  }
  return out;
}

}  // namespace gravpano
