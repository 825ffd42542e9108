#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gravpano/geometry.hpp"
#include "gravpano/polynomial.hpp"

namespace gravpano {

enum class SolverId {
  kH1f,
  kH2f1f2,
  kH2lambda,
  kH3l1l2,
  kH1fAligned,
  kH2f1f2Aligned,
  kH2lambdaAligned,
  kH3l1l2Aligned,
  kH4dlt,
};

std::string_view solver_name(SolverId id);
std::optional<SolverId> parse_solver(std::string_view name);
/// Number of correspondences a minimal sample needs.
int sample_size(SolverId id);
/// Upper bound on real roots of the final univariate equation.
int max_raw_solutions(SolverId id);
/// Upper bound on feasible candidates returned.
int max_candidates(SolverId id);
bool estimates_distortion(SolverId id);
bool is_aligned(SolverId id);
SolverId aligned_variant(SolverId id);

struct SolverOptions {
  // Feasibility window for the division coefficients (normalized units).
  double lambda_min = -2.0;
  double lambda_max = 0.5;
  // Search interval for the Cayley parameter in Sturm-based solvers.
  Interval s_bracket{-15.0, 15.0};
  // H2f1f2: drop candidates whose spare equation has relative residual
  // above 1e-6 (noise-free data) instead of only ranking by it.
  bool noise_free = false;
};

struct SolverCandidateSet {
  SolverId solver_id = SolverId::kH1f;
  std::vector<StitchModel> candidates;
  // Relative residual of the equations each candidate was derived from.
  std::vector<double> residuals;
  // Real roots of the univariate equation before feasibility filtering.
  int raw_count = 0;
};

SolverCandidateSet solve_h1f(const Correspondence& c, const SolverOptions& opts = {});
SolverCandidateSet solve_h2f1f2(const Correspondence& c1, const Correspondence& c2,
                                const SolverOptions& opts = {});
SolverCandidateSet solve_h2lambda(const Correspondence& c1, const Correspondence& c2,
                                  const SolverOptions& opts = {});
SolverCandidateSet solve_h3l1l2(const Correspondence& c1, const Correspondence& c2,
                                const Correspondence& c3, const SolverOptions& opts = {});

/// Gravity-aligned special cases (both priors identity). `id` may name either
/// the general or the aligned solver.
SolverCandidateSet solve_aligned(SolverId id, std::span<const Correspondence> cs,
                                 const SolverOptions& opts = {});

/// Hartley-normalized DLT homography on undistorted pixel coordinates, scale
/// fixed as in compose_model. Needs at least 4 correspondences.
Mat3 solve_h4dlt(std::span<const Correspondence> cs);

/// Focal lengths and rotation of a rotation-induced homography; nullopt when
/// the homography is not consistent with positive focal lengths.
std::optional<StitchModel> model_from_homography(const Mat3& H, const GravityPrior& g1,
                                                 const GravityPrior& g2);

/// Dispatches on `id` using the first sample_size(id) correspondences.
SolverCandidateSet solve(SolverId id, std::span<const Correspondence> cs,
                         const SolverOptions& opts = {});

/// True when the observed points lie in front of both cameras under `m`.
bool positive_depth(const StitchModel& m, const Correspondence& c);

/// Intermediate elimination results, exposed for structural checks.
namespace elimination {

/// H1f polynomial before removing the (1 + s^2) factor (degree 6).
UniPoly h1f_sextic(const Correspondence& c);
/// H2f1f2 matrix C(s) acting on [f1, 1].
PolyMat h2f1f2_matrix(const Correspondence& c1, const Correspondence& c2);
/// H2lambda polynomial before removing the (1 + s^2) factor (degree 10).
UniPoly h2lambda_raw(const Correspondence& c1, const Correspondence& c2);
/// H3l1l2 matrix C(s) acting on [f1 lambda1, f1, 1].
PolyMat h3l1l2_matrix(const Correspondence& c1, const Correspondence& c2,
                      const Correspondence& c3);
/// The single quadratic in s of an aligned solver.
UniPoly aligned_quadratic(SolverId id, std::span<const Correspondence> cs);

}  // namespace elimination

}  // namespace gravpano
