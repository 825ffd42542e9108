// Equal unknown focal length, no distortion, one correspondence.
//
// The last constraint row is alpha(s) f + beta(s) = 0, so f = -beta / alpha.
// Either remaining row, multiplied by f, is P0 + f (P1 + Q0) + f^2 Q1 = 0;
// substituting f and clearing alpha^2 gives a sextic that always carries the
// factor 1 + s^2.

#include "solver_common.hpp"

namespace gravpano {

namespace {

struct H1fSystem {
  ConstraintRows rows;
  UniPoly alpha;
  UniPoly beta;
  int row = 0;
  UniPoly sextic;
  double input_scale = 0.0;
};

struct FQuadratic {
  UniPoly c0, c1, c2;  // coefficients of 1, f, f^2 in f * row
};

FQuadratic f_quadratic(const ConstraintRows::SkewRow& r) {
  using detail::row_poly;
  const UniPoly P0 = row_poly(r.w_part, FTerm::kOne);
  const UniPoly P1 = row_poly(r.w_part, FTerm::kF);
  const UniPoly Q0 = row_poly(r.plain, FTerm::kOne);
  const UniPoly Q1 = row_poly(r.plain, FTerm::kF);
  return {P0, P1 + Q0, Q1};
}

H1fSystem build(const Correspondence& c) {
  H1fSystem sys;
  sys.rows = expand_constraints(c, ExpansionMode::kZeroDistortion);
  sys.alpha = detail::row_poly(sys.rows.b, FTerm::kF);
  sys.beta = detail::row_poly(sys.rows.b, FTerm::kOne);
  const UniPoly a2 = sys.alpha * sys.alpha;
  const UniPoly ab = sys.alpha * sys.beta;
  const UniPoly b2 = sys.beta * sys.beta;
  UniPoly best;
  double best_lead = -1.0;
  double row_scale = 0.0;
  for (int r = 0; r < 2; ++r) {
    const FQuadratic q = f_quadratic(sys.rows.rows[r]);
    UniPoly sextic = a2 * q.c0 - ab * q.c1 + b2 * q.c2;
    const double lead = std::abs(sextic.coeff(6));
    if (lead > best_lead) {
      best_lead = lead;
      best = std::move(sextic);
      sys.row = r;
    }
    row_scale = std::max({row_scale, detail::row9_norm(sys.rows.rows[r].w_part),
                          detail::row9_norm(sys.rows.rows[r].plain)});
  }
  sys.sextic = std::move(best);
  const double ab_scale = std::max(sys.alpha.norm_inf(), sys.beta.norm_inf());
  sys.input_scale = ab_scale * ab_scale * row_scale;
  return sys;
}

}  // namespace

namespace elimination {
UniPoly h1f_sextic(const Correspondence& c) { return build(c).sextic; }
}  // namespace elimination

SolverCandidateSet solve_h1f(const Correspondence& c, const SolverOptions& /*opts*/) {
  const H1fSystem sys = build(c);
  detail::require_nondegenerate(sys.sextic, sys.input_scale,
                                "H1f: elimination polynomial vanishes identically");
  const UniPoly quartic = deflate_one_plus_s2(sys.sextic);
  detail::require_nondegenerate(quartic, sys.input_scale,
                                "H1f: elimination polynomial vanishes identically");
  const std::vector<double> roots = solve_quartic(quartic.trimmed());

  SolverCandidateSet out;
  out.solver_id = SolverId::kH1f;
  out.raw_count = static_cast<int>(roots.size());

  const double ns = c.p1.norm_scale;
  const double ab_scale = std::max(sys.alpha.norm_inf(), sys.beta.norm_inf());
  const FQuadratic fq = f_quadratic(sys.rows.rows[sys.row]);
  const double fq_scale = std::max({fq.c0.norm_inf(), fq.c1.norm_inf(), fq.c2.norm_inf()});
  const Correspondence cs[1] = {c};
  for (double s : roots) {
    const double a = sys.alpha(s);
    const double b = sys.beta(s);
    const double sp = 1.0 + s * s;
    if (std::abs(a) <= 1e-9 * ab_scale * sp) {
      if (std::abs(b) <= 1e-9 * ab_scale * sp &&
          std::abs(fq.c0(s)) <= 1e-9 * fq_scale * sp &&
          std::abs(fq.c1(s)) <= 1e-9 * fq_scale * sp &&
          std::abs(fq.c2(s)) <= 1e-9 * fq_scale * sp) {
        throw DegenerateConfiguration("H1f: the correspondence is satisfied for every focal length");
      }
      continue;
    }
    const double f = -b / a;
    const detail::NormParams p{s, f, f, 0.0, 0.0};
    detail::add_candidate(out, p, ns, cs, detail::used_residual({&sys.rows}, {}, p));
  }
  return out;
}

}  // namespace gravpano
