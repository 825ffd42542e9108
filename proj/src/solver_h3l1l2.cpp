// Different unknown focal lengths and distortions, three correspondences.
//
// The three w- and lambda2-free rows form C(s) [f1 lambda1, f1, 1]^T = 0
// with a sextic determinant. (w, lambda2) then solve a 2x2 linear system
// built from one remaining row of each of the first two correspondences.

#include "solver_common.hpp"

namespace gravpano {

namespace elimination {
PolyMat h3l1l2_matrix(const Correspondence& c1, const Correspondence& c2,
                      const Correspondence& c3) {
  PolyMat C(3);
  int r = 0;
  for (const Correspondence* c : {&c1, &c2, &c3}) {
    const ConstraintRows rows = expand_constraints(*c, ExpansionMode::kDistortion);
    C.at(r, 0) = detail::row_poly(rows.b, FTerm::kFLambda);
    C.at(r, 1) = detail::row_poly(rows.b, FTerm::kF);
    C.at(r, 2) = detail::row_poly(rows.b, FTerm::kOne);
    ++r;
  }
  return C;
}
}  // namespace elimination

SolverCandidateSet solve_h3l1l2(const Correspondence& c1, const Correspondence& c2,
                                const Correspondence& c3, const SolverOptions& opts) {
  if (c1.p1.radius2() <= 1e-12 && c2.p1.radius2() <= 1e-12 && c3.p1.radius2() <= 1e-12) {
    throw InvalidInput("H3l1l2: first-image points all at the distortion center");
  }
  const ConstraintRows rows1 = expand_constraints(c1, ExpansionMode::kDistortion);
  const ConstraintRows rows2 = expand_constraints(c2, ExpansionMode::kDistortion);
  const ConstraintRows rows3 = expand_constraints(c3, ExpansionMode::kDistortion);
  const PolyMat C = elimination::h3l1l2_matrix(c1, c2, c3);
  const UniPoly det = polymat_det(C).trim();
  const double scale =
      detail::row9_norm(rows1.b) * detail::row9_norm(rows2.b) * detail::row9_norm(rows3.b);
  detail::require_nondegenerate(det, scale, "H3l1l2: C(s) is singular for every s");
  const std::vector<double> roots = sturm_roots(det, opts.s_bracket);

  SolverCandidateSet out;
  out.solver_id = SolverId::kH3l1l2;
  out.raw_count = static_cast<int>(roots.size());

  const double ns = c1.p1.norm_scale;
  const Correspondence cs[3] = {c1, c2, c3};
  for (double s : roots) {
    NullVector nv;
    try {
      nv = polymat_nullvector(C, s);
    } catch (const NoNullspace&) {
      continue;
    }
    if (nv.rank0) continue;
    const Eigen::VectorXd& v = nv.v;
    // v must factor as k * [f1 lambda1, f1, 1].
    if (std::abs(v(2)) < 1e-12 || std::abs(v(1)) < 1e-12) continue;
    const double f1 = v(1) / v(2);
    const double lambda1 = v(0) / v(1);
    if (!(f1 > 0.0) || !detail::lambda_feasible(lambda1, opts)) continue;
    const Eigen::VectorXd null_res = C.evaluate(s) * v;
    if (null_res.cwiseAbs().maxCoeff() > 1e-6 * C.evaluate(s).cwiseAbs().maxCoeff()) continue;
    double w = 0.0, lambda2 = 0.0;
    if (!detail::solve_second_camera(rows1, rows2, s, f1, lambda1, w, lambda2)) continue;
    if (!(w > 0.0) || !detail::lambda_feasible(lambda2, opts)) continue;
    const detail::NormParams p{s, f1, 1.0 / w, lambda1, lambda2};
    detail::add_candidate(out, p, ns, cs,
                          detail::used_residual({&rows1, &rows2}, {&rows3}, p));
  }
  return out;
}

}  // namespace gravpano
