// Gravity-aligned special cases (R1 = R2 = I).
//
// With identity priors every constraint is invariant under (s, f, w) ->
// (-s, -f, -w), so the eliminations reduce to a polynomial in t = s^2 of
// degree one, i.e. a quadratic in s. Writing A = x2 y1 and B = x1 y2, the
// w-free row of a correspondence gives
//   2 s y2 (f z1) = beta(t),  beta(t) = (A - B) + (A + B) t,
// which is substituted into the remaining equations.

#include <array>
#include <vector>

#include "solver_common.hpp"

namespace gravpano {

namespace {

struct Pt {
  double x1, y1, r1, x2, y2, r2;  // r = squared radius
};

// In majorant mode every input is replaced by its magnitude and every
// difference by a sum, which bounds the size of each monomial term.
struct Ops {
  bool majorant = false;

  Pt point(const Correspondence& c) const {
    Pt p{c.p1.x(), c.p1.y(), c.p1.radius2(), c.p2.x(), c.p2.y(), c.p2.radius2()};
    if (majorant) {
      p = {std::abs(p.x1), std::abs(p.y1), p.r1, std::abs(p.x2), std::abs(p.y2), p.r2};
    }
    return p;
  }
  double k(double x) const { return majorant ? std::abs(x) : x; }
  double sub(double a, double b) const { return majorant ? a + b : a - b; }
  UniPoly sub(const UniPoly& a, const UniPoly& b) const { return majorant ? a + b : a - b; }

  UniPoly beta(const Pt& p) const {
    const double A = p.x2 * p.y1;
    const double B = p.x1 * p.y2;
    return UniPoly({sub(A, B), A + B});
  }

  // Before removing the (1 + t) factor.
  UniPoly h1f(const Pt& p) const {
    const UniPoly bracket({sub(p.y2, p.y1), k(-p.y2 - p.y1)});
    return beta(p) * bracket + UniPoly({0.0, k(-4.0 * p.x1 * p.y2 * p.y2)});
  }

  UniPoly h2f1f2(const Pt& p, const Pt& q) const { return sub(beta(p) * q.y2, beta(q) * p.y2); }

  // f * (first row of p) with f z1_j = f + f lambda r1_j and the second-image
  // factor f + f lambda r2 interpolated from the two first-image values.
  // Before removing the (1 + t) factor.
  UniPoly h2lambda(const Pt& p, const Pt& q) const {
    const UniPoly b1 = beta(p);
    const UniPoly b2 = beta(q);
    const double delta = sub(q.r1, p.r1);
    const UniPoly first =
        (UniPoly({0.0, k(-4.0 * p.x1 * p.y2 * p.y2)}) + UniPoly({1.0, k(-1.0)}) * b1 * p.y2) *
        (delta * q.y2);
    const UniPoly second =
        UniPoly({1.0, 1.0}) * (b1 * (sub(q.r1, p.r2) * q.y2) + b2 * (sub(p.r2, p.r1) * p.y2)) * p.y1;
    return sub(first, second);
  }

  // [1, r1_j, f z1_j] rows are linearly dependent: k . (beta_j / y2_j) = 0
  // with k = (1,1,1) x (r1_1, r1_2, r1_3).
  UniPoly h3l1l2(const Pt& a, const Pt& b, const Pt& c) const {
    const double k0 = sub(c.r1, b.r1);
    const double k1 = sub(a.r1, c.r1);
    const double k2 = sub(b.r1, a.r1);
    return beta(a) * (k0 * b.y2 * c.y2) + beta(b) * (k1 * a.y2 * c.y2) +
           beta(c) * (k2 * a.y2 * b.y2);
  }

  // Polynomial in t before any deflation.
  UniPoly raw(SolverId a, std::span<const Correspondence> cs) const {
    switch (a) {
      case SolverId::kH1fAligned:
        return h1f(point(cs[0]));
      case SolverId::kH2f1f2Aligned:
        return h2f1f2(point(cs[0]), point(cs[1]));
      case SolverId::kH2lambdaAligned:
        return h2lambda(point(cs[0]), point(cs[1]));
      default:
        return h3l1l2(point(cs[0]), point(cs[1]), point(cs[2]));
    }
  }
};

// Exact division by (1 + t) of a polynomial in t of degree <= 2.
UniPoly deflate_one_plus_t(const UniPoly& q) {
  const double q0 = q.coeff(0), q1 = q.coeff(1), q2 = q.coeff(2);
  const double k1 = q2;
  const double k0 = q1 - q2;
  const double rem = q0 - k0;
  const double scale = std::max({std::abs(q0), std::abs(q1), std::abs(q2)});
  if (std::abs(rem) > 1e-8 * scale) throw NotDivisible("aligned: (1 + t) does not divide");
  return UniPoly({k0, k1});
}

UniPoly in_s(const UniPoly& linear_in_t) {
  return UniPoly({linear_in_t.coeff(0), 0.0, linear_in_t.coeff(1)});
}

bool has_one_plus_t_factor(SolverId a) {
  return a == SolverId::kH1fAligned || a == SolverId::kH2lambdaAligned;
}

SolverId to_aligned(SolverId id) {
  if (id == SolverId::kH4dlt) throw InvalidInput("aligned: H4 has no aligned variant");
  return is_aligned(id) ? id : aligned_variant(id);
}

void require_identity_priors(std::span<const Correspondence> cs) {
  for (const auto& c : cs) {
    if (!detail::near_identity(c.g1.rotation) || !detail::near_identity(c.g2.rotation)) {
      throw InvalidInput("aligned: gravity priors must be identity");
    }
  }
}

// f z1 of one correspondence at s from its w-free row.
struct FValue {
  double value;
  double weight;  // |coefficient of f z1|, relative to the row scale
};

FValue f_from_b_row(const ConstraintRows& rows, double s) {
  const auto& b = rows.b;
  const double cf = detail::eval_row9(b, s, 1.0, 0.0) - detail::eval_row9(b, s, 0.0, 0.0);
  const double c1 = detail::eval_row9(b, s, 0.0, 0.0);
  const double scale = detail::row9_norm(b) * (1.0 + s * s);
  if (scale == 0.0) return {0.0, 0.0};
  return {-c1 / cf, std::abs(cf) / scale};
}

bool b_rows_vanish(std::span<const ConstraintRows> rows, double s) {
  for (const auto& r : rows) {
    const double scale = detail::row9_norm(r.b) * (1.0 + s * s);
    const double cf = detail::eval_row9(r.b, s, 1.0, 0.0) - detail::eval_row9(r.b, s, 0.0, 0.0);
    const double c1 = detail::eval_row9(r.b, s, 0.0, 0.0);
    if (std::abs(cf) > 1e-9 * scale || std::abs(c1) > 1e-9 * scale) return false;
  }
  return true;
}

void require_sample(SolverId a, std::span<const Correspondence> cs) {
  if (static_cast<int>(cs.size()) < sample_size(a)) {
    throw InvalidInput("aligned: not enough correspondences");
  }
}

}  // namespace

namespace elimination {
UniPoly aligned_quadratic(SolverId id, std::span<const Correspondence> cs) {
  const SolverId a = to_aligned(id);
  require_sample(a, cs);
  const UniPoly raw = Ops{}.raw(a, cs);
  return in_s(has_one_plus_t_factor(a) ? deflate_one_plus_t(raw) : raw);
}
}  // namespace elimination

SolverCandidateSet solve_aligned(SolverId id, std::span<const Correspondence> cs_in,
                                 const SolverOptions& opts) {
  const SolverId a = to_aligned(id);
  require_sample(a, cs_in);
  const std::span<const Correspondence> cs = cs_in.first(sample_size(a));
  require_identity_priors(cs);
  if (a == SolverId::kH2lambdaAligned) {
    for (const auto& c : cs) {
      if (c.p1.radius2() <= 1e-12 && c.p2.radius2() <= 1e-12) {
        throw InvalidInput("H2lambda: correspondence at the distortion center carries no distortion information");
      }
    }
  }
  if (a == SolverId::kH3l1l2Aligned &&
      std::all_of(cs.begin(), cs.end(), [](const auto& c) { return c.p1.radius2() <= 1e-12; })) {
    throw InvalidInput("H3l1l2: first-image points all at the distortion center");
  }

  const UniPoly quad = elimination::aligned_quadratic(a, cs);
  const double scale = Ops{true}.raw(a, cs).norm_inf();
  detail::require_nondegenerate(quad, scale, "aligned: elimination polynomial vanishes identically");
  const std::vector<double> roots = solve_quadratic(quad.trimmed());

  SolverCandidateSet out;
  out.solver_id = a;
  out.raw_count = static_cast<int>(roots.size());

  const bool distortion = estimates_distortion(a);
  const ExpansionMode mode = distortion ? ExpansionMode::kDistortion : ExpansionMode::kZeroDistortion;
  std::vector<ConstraintRows> rows;
  for (const auto& c : cs) rows.push_back(expand_constraints(c, mode));
  const double ns = cs.front().p1.norm_scale;

  for (double s : roots) {
    if (b_rows_vanish(rows, s)) {
      throw DegenerateConfiguration("aligned: the focal length is undetermined at a root");
    }
    std::vector<FValue> F;
    for (const auto& r : rows) F.push_back(f_from_b_row(r, s));

    detail::NormParams p{s, 0.0, 0.0, 0.0, 0.0};
    double residual = 0.0;
    switch (a) {
      case SolverId::kH1fAligned: {
        if (F[0].weight <= 1e-12) continue;
        p.f1 = p.f2 = F[0].value;
        residual = detail::used_residual({&rows[0]}, {}, p);
        break;
      }
      case SolverId::kH2f1f2Aligned: {
        const FValue& best = F[0].weight >= F[1].weight ? F[0] : F[1];
        if (best.weight <= 1e-12) continue;
        p.f1 = best.value;
        const auto r0 = detail::eval_skew_row(rows[0].rows[0], s, p.f1, 0.0);
        const auto r1 = detail::eval_skew_row(rows[0].rows[1], s, p.f1, 0.0);
        const auto& wr = std::abs(r0.w_coeff) >= std::abs(r1.w_coeff) ? r0 : r1;
        if (wr.w_coeff == 0.0) continue;
        const double w = -wr.constant / wr.w_coeff;
        if (!(w > 0.0)) continue;
        p.f2 = 1.0 / w;
        residual = detail::used_residual({&rows[0]}, {&rows[1]}, p);
        break;
      }
      case SolverId::kH2lambdaAligned: {
        // F_j = f + f lambda r1_j.
        if (F[0].weight <= 1e-12 || F[1].weight <= 1e-12) continue;
        const double r1 = cs[0].p1.radius2(), r2 = cs[1].p1.radius2();
        const double d = r2 - r1;
        if (std::abs(d) <= 1e-12 * std::max(r1, r2)) continue;
        const double fl = (F[1].value - F[0].value) / d;
        const double f = (r2 * F[0].value - r1 * F[1].value) / d;
        p.f1 = p.f2 = f;
        p.lambda1 = p.lambda2 = fl / f;
        if (!detail::lambda_feasible(p.lambda1, opts)) continue;
        residual = detail::used_residual({&rows[0]}, {&rows[1]}, p);
        break;
      }
      default: {
        Eigen::Matrix<double, 3, 2> A;
        Eigen::Vector3d rhs;
        bool ok = true;
        for (int j = 0; j < 3; ++j) {
          if (F[j].weight <= 1e-12) ok = false;
          A(j, 0) = 1.0;
          A(j, 1) = cs[j].p1.radius2();
          rhs(j) = F[j].value;
        }
        if (!ok) continue;
        const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(rhs);
        p.f1 = sol(0);
        p.lambda1 = sol(1) / sol(0);
        if (!(p.f1 > 0.0) || !detail::lambda_feasible(p.lambda1, opts)) continue;
        double w = 0.0;
        if (!detail::solve_second_camera(rows[0], rows[1], s, p.f1, p.lambda1, w, p.lambda2)) {
          continue;
        }
        if (!(w > 0.0) || !detail::lambda_feasible(p.lambda2, opts)) continue;
        p.f2 = 1.0 / w;
        residual = detail::used_residual({&rows[0], &rows[1]}, {&rows[2]}, p);
        break;
      }
    }
    detail::add_candidate(out, p, ns, cs, residual);
  }
  return out;
}

}  // namespace gravpano
