#pragma once

// Helpers shared by the minimal solver translation units.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>

#include <Eigen/Dense>

#include "gravpano/errors.hpp"
#include "gravpano/geometry.hpp"
#include "gravpano/polynomial.hpp"
#include "gravpano/solvers.hpp"

namespace gravpano::detail {

using Row9 = ConstraintRows::Row9;

// Quadratic in s multiplying one f/lambda term of a row.
inline UniPoly row_poly(const Row9& r, FTerm t) {
  return UniPoly({r[row9_index(0, t)], r[row9_index(1, t)], r[row9_index(2, t)]});
}

inline double row9_norm(const Row9& r) {
  double m = 0.0;
  for (double x : r) m = std::max(m, std::abs(x));
  return m;
}

// Value of a Row9 at (s, f, f * lambda).
inline double eval_row9(const Row9& r, double s, double f, double flambda) {
  const double sp[3] = {1.0, s, s * s};
  double acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    acc += sp[k] * (r[row9_index(k, FTerm::kFLambda)] * flambda + r[row9_index(k, FTerm::kF)] * f +
                    r[row9_index(k, FTerm::kOne)]);
  }
  return acc;
}

struct SkewRowValue {
  double w_coeff;   // multiplies w = 1/f2
  double constant;  // free term
  double l_coeff;   // multiplies lambda2
};

inline SkewRowValue eval_skew_row(const ConstraintRows::SkewRow& r, double s, double f,
                                  double lambda) {
  return {eval_row9(r.w_part, s, f, f * lambda), eval_row9(r.plain, s, f, f * lambda),
          eval_row9(r.lambda2_part, s, f, f * lambda)};
}

inline double norm_scale_of(std::span<const Correspondence> cs) {
  return cs.front().p1.norm_scale;
}

inline bool lambda_feasible(double l, const SolverOptions& o) {
  return std::isfinite(l) && l >= o.lambda_min && l <= o.lambda_max;
}

// Throws when an elimination result vanishes relative to its input scale.
inline void require_nondegenerate(const UniPoly& p, double input_scale, const char* what) {
  if (!(p.norm_inf() > 1e-12 * input_scale)) throw DegenerateConfiguration(what);
}

// Parameters in normalized units.
struct NormParams {
  double s;
  double f1;
  double f2;
  double lambda1;
  double lambda2;
};

inline double relative_row_residual(const ConstraintRows& rows, int row, const NormParams& p) {
  const double w = 1.0 / p.f2;
  const double v = rows.evaluate(row, p.s, p.f1, w, p.lambda1, p.lambda2);
  const double scale = rows.term_scale(row, p.s, p.f1, w, p.lambda1, p.lambda2);
  return scale > 0.0 ? std::abs(v) / scale : std::abs(v);
}

// Max relative residual over all rows of `full` and the last row of `last_only`.
inline double used_residual(std::initializer_list<const ConstraintRows*> full,
                            std::initializer_list<const ConstraintRows*> last_only,
                            const NormParams& p) {
  double r = 0.0;
  for (const auto* rows : full)
    for (int i = 0; i < 3; ++i) r = std::max(r, relative_row_residual(*rows, i, p));
  for (const auto* rows : last_only) r = std::max(r, relative_row_residual(*rows, 2, p));
  return r;
}

// Builds a model from normalized parameters and appends it when it passes
// the focal and positive-depth checks. Returns true when appended.
inline bool add_candidate(SolverCandidateSet& out, const NormParams& p, double norm_scale,
                          std::span<const Correspondence> cs, double residual) {
  if (!(p.f1 > 0.0) || !(p.f2 > 0.0) || !std::isfinite(p.f1) || !std::isfinite(p.f2) ||
      !std::isfinite(p.s)) {
    return false;
  }
  StitchModel m = compose_model(p.s, p.f1 * norm_scale, p.f2 * norm_scale, p.lambda1, p.lambda2,
                                cs.front().g1, cs.front().g2);
  for (const auto& c : cs) {
    if (!positive_depth(m, c)) return false;
  }
  out.candidates.push_back(m);
  out.residuals.push_back(residual);
  return true;
}

// Solves w * w_coeff + lambda2 * l_coeff = -constant for two rows, choosing
// the best-conditioned pair among the remaining rows of c1 and c2.
inline bool solve_second_camera(const ConstraintRows& r1, const ConstraintRows& r2, double s, double f1,
                         double lambda1, double& w, double& lambda2) {
  const SkewRowValue a[2] = {eval_skew_row(r1.rows[0], s, f1, lambda1),
                                     eval_skew_row(r1.rows[1], s, f1, lambda1)};
  const SkewRowValue b[2] = {eval_skew_row(r2.rows[0], s, f1, lambda1),
                                     eval_skew_row(r2.rows[1], s, f1, lambda1)};
  double best = -1.0;
  Eigen::Matrix2d A_best;
  Eigen::Vector2d rhs_best;
  for (const auto& x : a) {
    for (const auto& y : b) {
      Eigen::Matrix2d A;
      A << x.w_coeff, x.l_coeff, y.w_coeff, y.l_coeff;
      const double nx = std::hypot(x.w_coeff, x.l_coeff);
      const double ny = std::hypot(y.w_coeff, y.l_coeff);
      if (nx == 0.0 || ny == 0.0) continue;
      const double cond = std::abs(A.determinant()) / (nx * ny);
      if (cond > best) {
        best = cond;
        A_best = A;
        rhs_best << -x.constant, -y.constant;
      }
    }
  }
  if (!(best > 1e-12)) return false;
  const Eigen::Vector2d sol = A_best.partialPivLu().solve(rhs_best);
  w = sol(0);
  lambda2 = sol(1);
  return std::isfinite(w) && std::isfinite(lambda2);
}


// Newton iterations on a square system with a central-difference Jacobian.
// Steps are kept only while the residual norm decreases.
template <int N, class Fn>
Eigen::Matrix<double, N, 1> newton_polish(Fn&& residual, Eigen::Matrix<double, N, 1> x,
                                          int iterations) {
  using Vec = Eigen::Matrix<double, N, 1>;
  Vec r = residual(x);
  for (int it = 0; it < iterations; ++it) {
    Eigen::Matrix<double, N, N> J;
    for (int j = 0; j < N; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(j)));
      Vec xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      J.col(j) = (residual(xp) - residual(xm)) / (2.0 * h);
    }
    const Vec step = J.fullPivLu().solve(r);
    if (!step.allFinite()) break;
    const Vec xn = x - step;
    const Vec rn = residual(xn);
    if (!(rn.norm() < r.norm())) break;
    x = xn;
    r = rn;
  }
  return x;
}

inline bool near_identity(const Mat3& R) { return (R - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9; }

}  // namespace gravpano::detail
