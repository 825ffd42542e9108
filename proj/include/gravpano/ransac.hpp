#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gravpano/geometry.hpp"
#include "gravpano/solvers.hpp"

namespace gravpano {

enum class ScoringMode {
  kInlierCount,
  // Sum over points of 1 - min(e^2, t^2) / t^2 (MSAC-style, higher is better).
  kTruncatedLoss,
};

struct RansacConfig {
  double confidence = 0.99;
  double inlier_threshold = 3.0;  // pixels, symmetric transfer error
  int max_iterations = 10000;
  // 0 selects the solver's minimal sample size.
  int min_sample_size = 0;
  bool lo_enabled = true;
  int lo_max_rounds = 10;
  std::uint64_t seed = 0;
  ScoringMode scoring = ScoringMode::kInlierCount;
  SolverOptions solver_options{};
  // Worker threads for hypothesis evaluation; 0 uses worker_count(). The
  // result does not depend on this value.
  int threads = 0;
};

struct RansacResult {
  StitchModel model;
  std::vector<bool> inlier_mask;
  int inlier_count = 0;
  int iterations_run = 0;
  double score = 0.0;
  int lo_rounds = 0;
};

/// Minimum number of inliers for any model to be accepted.
inline constexpr int kMinInliers = 4;

/// Locally optimized RANSAC. Throws InvalidInput when there are fewer
/// correspondences than the sample size and NoModel when no hypothesis
/// reaches kMinInliers inliers.
RansacResult ransac(std::span<const Correspondence> cs, SolverId solver, const RansacConfig& config);

/// ceil(log(1 - confidence) / log(1 - inlier_ratio^sample_size)), at least 1
/// and at most max_iterations.
int iteration_budget(double confidence, double inlier_ratio, int sample_size,
                     int max_iterations = 10000);

enum class RefineMode { kNoDistortion, kDistortion };

struct RefineResult {
  StitchModel model;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt over (theta, f1, f2) or (theta, f1, f2, lambda1,
/// lambda2) minimizing forward plus backward squared transfer residuals.
/// Returns `initial` unchanged if the cost would increase.
RefineResult refine_nonminimal(std::span<const Correspondence> inliers, const StitchModel& initial,
                               RefineMode mode, int max_iterations = 100);

/// Residual model used by refine_nonminimal, exposed for derivative checks.
namespace refine {

/// Parameters [theta, f1 / ns, f2 / ns, lambda1, lambda2].
using Params = Eigen::Matrix<double, 5, 1>;

Params to_params(const StitchModel& m, double norm_scale);
StitchModel from_params(const Params& x, const StitchModel& base, double norm_scale);

/// Stacked residuals (4 per correspondence) and their Jacobian with respect
/// to all five parameters. Returns false when a point leaves the valid
/// distortion range.
bool evaluate(std::span<const Correspondence> cs, const Params& x, const StitchModel& base,
              Eigen::VectorXd& residuals, Eigen::MatrixXd* jacobian);

/// 0.5 * sum of squared residuals; +infinity when evaluate fails.
double cost(std::span<const Correspondence> cs, const StitchModel& m);

}  // namespace refine

}  // namespace gravpano
