#include "gravpano/synthbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "gravpano/errors.hpp"
#include "parallel.hpp"

namespace gravpano {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Mat3 camera_prior(double roll_deg, double pitch_deg) {
  return rotation_about_z(roll_deg * kDeg) * rotation_about_x(pitch_deg * kDeg);
}

bool inside(const DistortedPoint& p, double half_extent) {
  if (!std::isfinite(p.u) || !std::isfinite(p.v)) return false;
  return half_extent <= 0.0 || (std::abs(p.u) <= half_extent && std::abs(p.v) <= half_extent);
}

// Projects X (camera-1 frame) into both images; false when not visible.
bool project(const SceneConfig& cfg, const StitchModel& truth, const Vec3& X,
             DistortedPoint& p1, DistortedPoint& p2) {
  const Vec3 Y = truth.relative_rotation() * X;
  if (!(X.z() > 0.0) || !(Y.z() > 0.0)) return false;
  const double ns = cfg.norm_scale;
  try {
    p1 = distort(Vec3(X.x() * cfg.f1_gt / ns, X.y() * cfg.f1_gt / ns, X.z()), cfg.lambda1_gt, ns);
    p2 = distort(Vec3(Y.x() * cfg.f2_gt / ns, Y.y() * cfg.f2_gt / ns, Y.z()), cfg.lambda2_gt, ns);
  } catch (const OutOfRange&) {
    return false;
  }
  return inside(p1, cfg.image_half_extent) && inside(p2, cfg.image_half_extent);
}

double signed_geometric_mean(double a, double b) {
  const double m = std::sqrt(std::abs(a * b));
  return (a + b) < 0.0 ? -m : m;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

int worker_count() {
  if (const char* env = std::getenv("GRAVPANO_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Scene generate_scene(const SceneConfig& cfg, std::uint64_t trial_seed) {
  if (!(cfg.box_min.z() > 0.0) || (cfg.box_max - cfg.box_min).minCoeff() < 0.0) {
    throw InvalidInput("scene box must lie in front of the camera");
  }
  if (!(cfg.f1_gt > 0.0) || !(cfg.f2_gt > 0.0) || !(cfg.norm_scale > 0.0) || cfg.n_points < 1) {
    throw InvalidInput("scene focal lengths, norm_scale and n_points must be positive");
  }
  if (cfg.image_noise_sigma < 0.0 || cfg.roll_noise_sigma < 0.0 || cfg.pitch_noise_sigma < 0.0) {
    throw InvalidInput("noise sigmas must be non-negative");
  }
  std::mt19937_64 rng(trial_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  double yaw = uniform(cfg.yaw_min_deg, cfg.yaw_max_deg);
  if (unit(rng) < 0.5) yaw = -yaw;
  Mat3 R1 = Mat3::Identity(), R2 = Mat3::Identity();
  if (!cfg.aligned) {
    const double r = cfg.roll_pitch_range_deg;
    R1 = camera_prior(uniform(-r, r), uniform(-r, r));
    R2 = camera_prior(uniform(-r, r), uniform(-r, r));
  }
  Scene scene;
  scene.truth = compose_model(std::tan(0.5 * yaw * kDeg), cfg.f1_gt, cfg.f2_gt, cfg.lambda1_gt,
                              cfg.lambda2_gt, GravityPrior{R1}, GravityPrior{R2});

  // Observed priors carry roll/pitch noise about the camera z and x axes.
  // Noise variates are drawn even at zero sigma so that scenes differing
  // only in a noise level share geometry and standardized noise.
  GravityPrior g1{R1}, g2{R2};
  const double n1 = normal(rng), n2 = normal(rng), n3 = normal(rng), n4 = normal(rng);
  if (cfg.roll_noise_sigma > 0.0 || cfg.pitch_noise_sigma > 0.0) {
    g1.rotation = R1 * camera_prior(cfg.roll_noise_sigma * n1, cfg.pitch_noise_sigma * n2);
    g2.rotation = R2 * camera_prior(cfg.roll_noise_sigma * n3, cfg.pitch_noise_sigma * n4);
  }

  const long max_attempts = 100L * (cfg.n_points + std::max(cfg.n_holdout, 0));
  long attempts = 0;
  auto next_visible = [&](DistortedPoint& p1, DistortedPoint& p2) {
    while (attempts++ < max_attempts) {
      const Vec3 X(uniform(cfg.box_min.x(), cfg.box_max.x()), uniform(cfg.box_min.y(), cfg.box_max.y()),
                   uniform(cfg.box_min.z(), cfg.box_max.z()));
      if (project(cfg, scene.truth, X, p1, p2)) return true;
    }
    throw InfeasibleConfig("too few scene points project inside both images");
  };

  const double extent = cfg.image_half_extent > 0.0 ? cfg.image_half_extent : cfg.norm_scale;
  scene.correspondences.reserve(cfg.n_points);
  scene.is_inlier.reserve(cfg.n_points);
  for (int i = 0; i < cfg.n_points; ++i) {
    DistortedPoint p1, p2;
    next_visible(p1, p2);
    const bool outlier = cfg.outlier_ratio > 0.0 && unit(rng) < cfg.outlier_ratio;
    if (outlier) {
      p2.u = uniform(-extent, extent);
      p2.v = uniform(-extent, extent);
    }
    const double e[4] = {normal(rng), normal(rng), normal(rng), normal(rng)};
    if (cfg.image_noise_sigma > 0.0) {
      p1.u += cfg.image_noise_sigma * e[0];
      p1.v += cfg.image_noise_sigma * e[1];
      p2.u += cfg.image_noise_sigma * e[2];
      p2.v += cfg.image_noise_sigma * e[3];
    }
    scene.correspondences.push_back({p1, p2, g1, g2});
    scene.is_inlier.push_back(!outlier);
  }
  for (int i = 0; i < cfg.n_holdout; ++i) {
    DistortedPoint p1, p2;
    next_visible(p1, p2);
    scene.holdout.push_back({p1, p2, GravityPrior{R1}, GravityPrior{R2}});
  }
  return scene;
}

TrialRecord compute_errors(const SolverCandidateSet& cands, const Scene& scene) {
  TrialRecord rec;
  rec.solver_id = cands.solver_id;
  rec.candidate_count = static_cast<int>(cands.candidates.size());
  if (cands.candidates.empty()) return rec;
  const StitchModel& gt = scene.truth;
  const Mat3 R_gt = gt.relative_rotation();
  const StitchModel* best = nullptr;
  double best_rot = kFailed;
  for (const auto& m : cands.candidates) {
    const double e = rotation_angle(m.relative_rotation() * R_gt.transpose());
    if (!best || e < best_rot) {
      best = &m;
      best_rot = e;
    }
  }
  rec.failed = false;
  rec.rotation_error = best_rot;
  const double f_gt = std::sqrt(gt.f1 * gt.f2);
  rec.focal_error = std::abs(std::sqrt(best->f1 * best->f2) - f_gt) / f_gt;
  rec.distortion_error = signed_geometric_mean(gt.lambda1, gt.lambda2) -
                         signed_geometric_mean(best->lambda1, best->lambda2);
  double sum = 0.0;
  for (const auto& c : scene.holdout) sum += transfer_error(*best, c, TransferMode::kSymmetric);
  rec.reprojection_error = scene.holdout.empty() ? 0.0 : sum / static_cast<double>(scene.holdout.size());
  return rec;
}

std::vector<TrialRecord> run_sweep(const SceneConfig& config, SweepKind sweep,
                                   const std::vector<double>& levels,
                                   const std::vector<SolverId>& solvers) {
  if (config.n_trials < 0) throw InvalidInput("n_trials must be non-negative");
  const std::size_t nt = static_cast<std::size_t>(config.n_trials);
  const std::size_t ns = solvers.size();
  std::vector<TrialRecord> out(levels.size() * ns * nt);

  // Scene seeds depend on the trial only: every solver and every level sees
  // the same geometry and standardized noise. Aligned variants get
  // gravity-aligned scenes.
  detail::parallel_for(out.size(), worker_count(), [&](std::size_t k) {
    const std::size_t li = k / (ns * nt);
    const std::size_t si = (k / nt) % ns;
    const std::size_t t = k % nt;
    SceneConfig cfg = config;
    switch (sweep) {
      case SweepKind::kImageNoise:
        cfg.image_noise_sigma = levels[li];
        break;
      case SweepKind::kRollNoise:
        cfg.roll_noise_sigma = levels[li];
        break;
      case SweepKind::kPitchNoise:
        cfg.pitch_noise_sigma = levels[li];
        break;
    }
    const SolverId id = solvers[si];
    if (is_aligned(id)) cfg.aligned = true;
    const Scene scene = generate_scene(cfg, derive_seed(config.seed, t));
    const int m = sample_size(id);
    const std::span<const Correspondence> sample(scene.correspondences.data(),
                                                 static_cast<std::size_t>(m));
    SolverCandidateSet cands;
    cands.solver_id = id;
    double us = 0.0;
    try {
      const auto t0 = std::chrono::steady_clock::now();
      cands = solve(id, sample);
      const auto t1 = std::chrono::steady_clock::now();
      us = std::chrono::duration<double, std::micro>(t1 - t0).count();
    } catch (const Error&) {
      cands.candidates.clear();
    }
    TrialRecord rec = compute_errors(cands, scene);
    rec.solver_id = id;
    rec.level = levels[li];
    rec.trial = static_cast<int>(t);
    rec.solve_time_us = config.record_timing ? us : 0.0;
    out[k] = rec;
  });
  return out;
}

double field_value(const TrialRecord& r, RecordField f) {
  if (r.failed) return kFailed;
  switch (f) {
    case RecordField::kFocal:
      return r.focal_error;
    case RecordField::kRotation:
      return r.rotation_error;
    case RecordField::kDistortion:
      return r.distortion_error;
    case RecordField::kReprojection:
      return r.reprojection_error;
    case RecordField::kSolveTime:
      return r.solve_time_us;
  }
  return kFailed;
}

std::vector<std::pair<double, double>> aggregate_cdf(const std::vector<TrialRecord>& records,
                                                     RecordField field) {
  if (records.empty()) throw InvalidInput("aggregate_cdf: no records");
  std::vector<double> v;
  for (const auto& r : records) {
    const double x = field_value(r, field);
    if (std::isfinite(x)) v.push_back(x);
  }
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(records.size());
  std::vector<std::pair<double, double>> cdf;
  cdf.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) cdf.emplace_back(v[i], static_cast<double>(i + 1) / n);
  return cdf;
}

double median_of(const std::vector<TrialRecord>& records, RecordField field) {
  if (records.empty()) throw InvalidInput("median_of: no records");
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& r : records) {
    double x = field_value(r, field);
    if (field == RecordField::kDistortion) x = std::abs(x);
    v.push_back(std::isnan(x) ? kFailed : x);
  }
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << "solver_id,level,trial,focal_error,rotation_error,distortion_error,reprojection_error,"
        "solve_time_us,candidate_count,failed\n";
  for (const auto& r : records) {
    os << solver_name(r.solver_id) << ',' << format_double(r.level) << ',' << r.trial << ','
       << format_double(r.focal_error) << ',' << format_double(r.rotation_error) << ','
       << format_double(r.distortion_error) << ',' << format_double(r.reprojection_error) << ','
       << format_double(r.solve_time_us) << ',' << r.candidate_count << ',' << (r.failed ? 1 : 0)
       << '\n';
  }
}

void write_cdf_csv(std::ostream& os, const std::vector<std::pair<double, double>>& cdf) {
  os << "value,fraction\n";
  for (const auto& [v, f] : cdf) os << format_double(v) << ',' << format_double(f) << '\n';
}

}  // namespace gravpano
