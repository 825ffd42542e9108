// Equal unknown focal length and distortion, two correspondences.
//
// The w-free rows of both correspondences are linear in u = [f lambda, f, 1]
// with quadratic-in-s coefficients, so u(s) is proportional to their cross
// product (degree 4 per entry). One remaining row of the first
// correspondence, multiplied by f, is a quadratic form in u; substituting
// u(s) gives a degree-10 polynomial divisible by 1 + s^2, leaving degree 8.

#include <array>

#include "solver_common.hpp"

namespace gravpano {

namespace {

using Vec3Poly = std::array<UniPoly, 3>;  // indexed by FTerm

Vec3Poly row_as_polys(const ConstraintRows::Row9& r) {
  return {detail::row_poly(r, FTerm::kFLambda), detail::row_poly(r, FTerm::kF),
          detail::row_poly(r, FTerm::kOne)};
}

Vec3Poly cross(const Vec3Poly& a, const Vec3Poly& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

constexpr int kFL = static_cast<int>(FTerm::kFLambda);
constexpr int kF = static_cast<int>(FTerm::kF);
constexpr int kOne = static_cast<int>(FTerm::kOne);

// f * row = u^T Q u with lambda2 = lambda and w = 1/f. Returns the sum over
// the symmetric quadratic form expanded into u(s) components.
UniPoly substitute_quadratic_form(const ConstraintRows::SkewRow& r, const Vec3Poly& u) {
  const Vec3Poly W = row_as_polys(r.w_part);
  const Vec3Poly N = row_as_polys(r.plain);
  const Vec3Poly L = row_as_polys(r.lambda2_part);
  // f*row = W.u * u1^0 ... written out per monomial pair:
  //   W:  (W_fl u_fl + W_f u_f + W_1 u_1) * u_1
  //   f*N: (N_fl u_fl + N_f u_f + N_1 u_1) * u_f
  //   f*lambda*L: (L_fl u_fl + L_f u_f + L_1 u_1) * u_fl
  const UniPoly& ufl = u[kFL];
  const UniPoly& uf = u[kF];
  const UniPoly& u1 = u[kOne];
  const UniPoly lin_w = W[kFL] * ufl + W[kF] * uf + W[kOne] * u1;
  const UniPoly lin_n = N[kFL] * ufl + N[kF] * uf + N[kOne] * u1;
  const UniPoly lin_l = L[kFL] * ufl + L[kF] * uf + L[kOne] * u1;
  return lin_w * u1 + lin_n * uf + lin_l * ufl;
}

struct H2lambdaSystem {
  ConstraintRows rows1;
  ConstraintRows rows2;
  Vec3Poly e1;
  Vec3Poly e2;
  UniPoly raw;  // degree 10
  int row = 0;   // row of the first correspondence used in `raw`
  double input_scale = 0.0;
};

H2lambdaSystem build(const Correspondence& c1, const Correspondence& c2) {
  H2lambdaSystem sys;
  sys.rows1 = expand_constraints(c1, ExpansionMode::kDistortion);
  sys.rows2 = expand_constraints(c2, ExpansionMode::kDistortion);
  sys.e1 = row_as_polys(sys.rows1.b);
  sys.e2 = row_as_polys(sys.rows2.b);
  const Vec3Poly u = cross(sys.e1, sys.e2);
  double best_lead = -1.0;
  double row_scale = 0.0;
  for (int r = 0; r < 2; ++r) {
    UniPoly p = substitute_quadratic_form(sys.rows1.rows[r], u);
    const double lead = std::abs(p.coeff(10));
    if (lead > best_lead) {
      best_lead = lead;
      sys.raw = std::move(p);
      sys.row = r;
    }
    const auto& sr = sys.rows1.rows[r];
    row_scale = std::max({row_scale, detail::row9_norm(sr.w_part), detail::row9_norm(sr.plain),
                          detail::row9_norm(sr.lambda2_part)});
  }
  const double b = detail::row9_norm(sys.rows1.b) * detail::row9_norm(sys.rows2.b);
  sys.input_scale = b * b * row_scale;
  return sys;
}

Eigen::Vector3d polish(const H2lambdaSystem& sys, const Eigen::Vector3d& x0) {
  auto residual = [&](const Eigen::Vector3d& x) {
    const double s = x(0), f = x(1), fl = x(2);
    const double l = fl / f;
    Eigen::Vector3d r;
    r(0) = sys.rows1.evaluate(2, s, f, 1.0 / f, l, l) / sys.rows1.term_scale(2, s, f, 1.0 / f, l, l);
    r(1) = sys.rows2.evaluate(2, s, f, 1.0 / f, l, l) / sys.rows2.term_scale(2, s, f, 1.0 / f, l, l);
    r(2) = sys.rows1.evaluate(sys.row, s, f, 1.0 / f, l, l) /
           sys.rows1.term_scale(sys.row, s, f, 1.0 / f, l, l);
    return r;
  };
  if (!(x0(1) > 0.0) || !x0.allFinite()) return x0;
  return detail::newton_polish<3>(residual, x0, 3);
}

void require_off_center(const Correspondence& c) {
  if (c.p1.radius2() <= 1e-12 && c.p2.radius2() <= 1e-12) {
    throw InvalidInput("H2lambda: correspondence at the distortion center carries no distortion information");
  }
}

}  // namespace

namespace elimination {
UniPoly h2lambda_raw(const Correspondence& c1, const Correspondence& c2) {
  return build(c1, c2).raw;
}
}  // namespace elimination

SolverCandidateSet solve_h2lambda(const Correspondence& c1, const Correspondence& c2,
                                  const SolverOptions& opts) {
  require_off_center(c1);
  require_off_center(c2);
  const H2lambdaSystem sys = build(c1, c2);
  detail::require_nondegenerate(sys.raw, sys.input_scale,
                                "H2lambda: elimination polynomial vanishes identically");
  const UniPoly octic = deflate_one_plus_s2(sys.raw).trim();
  detail::require_nondegenerate(octic, sys.input_scale,
                                "H2lambda: elimination polynomial vanishes identically");
  const std::vector<double> roots = sturm_roots(octic, opts.s_bracket);

  SolverCandidateSet out;
  out.solver_id = SolverId::kH2lambda;
  out.raw_count = static_cast<int>(roots.size());

  const double ns = c1.p1.norm_scale;
  const Correspondence cs[2] = {c1, c2};
  for (double s : roots) {
    const Vec3 a(sys.e1[0](s), sys.e1[1](s), sys.e1[2](s));
    const Vec3 b(sys.e2[0](s), sys.e2[1](s), sys.e2[2](s));
    const Vec3 u = a.cross(b);
    if (std::abs(u[kOne]) <= 1e-14 * u.norm() || std::abs(u[kF]) <= 1e-14 * u.norm()) continue;
    // The cross product loses precision when the two rows are nearly
    // parallel; polish (s, f, f lambda) on the three equations used.
    const Eigen::Vector3d x = polish(sys, Eigen::Vector3d(s, u[kF] / u[kOne], u[kFL] / u[kOne]));
    const double f = x(1);
    const double lambda = x(2) / x(1);
    if (!(f > 0.0) || !detail::lambda_feasible(lambda, opts)) continue;
    const detail::NormParams p{x(0), f, f, lambda, lambda};
    detail::add_candidate(out, p, ns, cs, detail::used_residual({&sys.rows1}, {&sys.rows2}, p));
  }
  return out;
}

}  // namespace gravpano
