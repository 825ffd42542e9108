#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "gravpano/geometry.hpp"
#include "gravpano/solvers.hpp"

namespace gravpano {

struct SceneConfig {
  int n_points = 200;
  // Points are sampled uniformly in this box (camera-1 frame).
  Vec3 box_min{-3.0, -3.0, 4.0};
  Vec3 box_max{3.0, 3.0, 6.0};
  double f1_gt = 1000.0;
  double f2_gt = 1000.0;
  double lambda1_gt = 0.0;
  double lambda2_gt = 0.0;
  // Yaw magnitude is uniform in [yaw_min_deg, yaw_max_deg] with a random sign.
  double yaw_min_deg = 5.0;
  double yaw_max_deg = 60.0;
  // True roll and pitch of each camera are uniform in +-roll_pitch_range_deg.
  double roll_pitch_range_deg = 10.0;
  // Identity priors (gravity-aligned cameras); roll/pitch range is ignored.
  bool aligned = false;
  double image_noise_sigma = 0.0;    // pixels
  double roll_noise_sigma = 0.0;     // degrees
  double pitch_noise_sigma = 0.0;    // degrees
  // Fraction of correspondences whose second point is replaced by a uniform
  // random image location.
  double outlier_ratio = 0.0;
  // Half width of the square image in pixels; <= 0 disables the bound.
  double image_half_extent = 1000.0;
  double norm_scale = 1000.0;
  // Noise-free correspondences kept aside for reprojection scoring.
  int n_holdout = 50;
  int n_trials = 1000;
  std::uint64_t seed = 1;
  // Fill TrialRecord::solve_time_us. Off by default so that records are
  // reproducible byte for byte.
  bool record_timing = false;
};

struct Scene {
  StitchModel truth;  // built from the true (noise-free) priors
  std::vector<Correspondence> correspondences;
  std::vector<bool> is_inlier;
  std::vector<Correspondence> holdout;
};

/// Random scene for one trial; deterministic in (config, trial_seed).
/// Throws InfeasibleConfig when fewer than n_points project inside the image
/// after 100 * n_points attempts.
Scene generate_scene(const SceneConfig& config, std::uint64_t trial_seed);

constexpr double kFailed = std::numeric_limits<double>::infinity();

struct TrialRecord {
  SolverId solver_id = SolverId::kH1f;
  double level = 0.0;
  int trial = 0;
  double focal_error = kFailed;
  double rotation_error = kFailed;
  double distortion_error = kFailed;
  double reprojection_error = kFailed;
  double solve_time_us = 0.0;
  int candidate_count = 0;
  bool failed = true;
};

/// Errors of the candidate closest in rotation to the ground truth.
TrialRecord compute_errors(const SolverCandidateSet& candidates, const Scene& scene);

enum class SweepKind { kImageNoise, kRollNoise, kPitchNoise };

/// For every level, solver and trial: generates a scene, solves on its first
/// minimal sample and records the errors. Trial t uses the same scene seed at
/// every level and for every solver. Records are ordered by level, solver,
/// trial independently of the worker count.
std::vector<TrialRecord> run_sweep(const SceneConfig& config, SweepKind sweep,
                                   const std::vector<double>& levels,
                                   const std::vector<SolverId>& solvers);

enum class RecordField { kFocal, kRotation, kDistortion, kReprojection, kSolveTime };

double field_value(const TrialRecord& r, RecordField f);

/// Empirical CDF; failed trials count towards the denominator only.
std::vector<std::pair<double, double>> aggregate_cdf(const std::vector<TrialRecord>& records,
                                                     RecordField field);

/// Median with failures treated as +infinity. Distortion uses |value|.
double median_of(const std::vector<TrialRecord>& records, RecordField field);

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records);
void write_cdf_csv(std::ostream& os, const std::vector<std::pair<double, double>>& cdf);

/// Number of worker threads: GRAVPANO_THREADS when set, else hardware
/// concurrency (at least 1).
int worker_count();

/// Deterministic per-index seed derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0);

}  // namespace gravpano
