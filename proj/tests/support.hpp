#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gravpano/polynomial.hpp"
#include "gravpano/solvers.hpp"
#include "gravpano/synthbench.hpp"

namespace gravpano::testing {

// Real roots from the eigenvalues of the companion matrix.
inline std::vector<double> companion_real_roots(const UniPoly& p, double imag_tol = 1e-7) {
  const UniPoly q = p.trimmed();
  const int d = q.degree();
  if (d < 1) return {};
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) C(i, d - 1) = -q.coeff(i) / q.coeff(d);
  Eigen::EigenSolver<Eigen::MatrixXd> es(C);
  std::vector<double> out;
  for (int i = 0; i < d; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) <= imag_tol * std::max(1.0, std::abs(z))) out.push_back(z.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Largest distance from any root in a to its nearest root in b and back.
inline double hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return 1e300;
  auto one_way = [](const std::vector<double>& x, const std::vector<double>& y) {
    double h = 0.0;
    for (double u : x) {
      double m = 1e300;
      for (double v : y) m = std::min(m, std::abs(u - v) / std::max(1.0, std::abs(u)));
      h = std::max(h, m);
    }
    return h;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

// Polynomial with `real_roots` and `complex_pairs` pairs of complex roots.
inline UniPoly random_poly(std::mt19937_64& rng, int degree, int complex_pairs) {
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  UniPoly p{U(rng) > 0 ? 1.0 : -1.0};
  for (int k = 0; k < complex_pairs; ++k) {
    const double re = U(rng), im = 0.1 + std::abs(U(rng));
    p = p * UniPoly({re * re + im * im, -2.0 * re, 1.0});
  }
  for (int k = 0; k < degree - 2 * complex_pairs; ++k) p = p * UniPoly({-U(rng), 1.0});
  return p;
}

struct Truth {
  double s, f1, f2, lambda1, lambda2;
};

// Noise-free minimal instance with random parameters in the ranges of the
// exactness study. Equal-focal / equal-lambda solvers get equal values.
struct Instance {
  Scene scene;
  Truth truth;
};

inline Instance random_instance(SolverId id, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const SolverId base = id;
  const bool equal_f = base == SolverId::kH1f || base == SolverId::kH2lambda ||
                       base == SolverId::kH1fAligned || base == SolverId::kH2lambdaAligned;
  const bool equal_l = base == SolverId::kH2lambda || base == SolverId::kH2lambdaAligned;
  SceneConfig cfg;
  cfg.n_points = std::max(sample_size(id), 4);
  cfg.n_holdout = 0;
  cfg.image_half_extent = 0.0;
  cfg.yaw_min_deg = 0.0;
  cfg.yaw_max_deg = 80.0;
  cfg.roll_pitch_range_deg = 30.0;
  cfg.aligned = is_aligned(id);
  cfg.f1_gt = 500.0 + 1500.0 * U(rng);
  cfg.f2_gt = equal_f ? cfg.f1_gt : 500.0 + 1500.0 * U(rng);
  if (estimates_distortion(id)) {
    cfg.lambda1_gt = -0.7 * U(rng);
    cfg.lambda2_gt = equal_l ? cfg.lambda1_gt : -0.7 * U(rng);
  }
  Instance inst;
  inst.scene = generate_scene(cfg, rng());
  inst.truth = {inst.scene.truth.s, cfg.f1_gt, cfg.f2_gt, cfg.lambda1_gt, cfg.lambda2_gt};
  return inst;
}

inline bool matches(const StitchModel& m, const Truth& t, double tol = 1e-6) {
  return std::abs(m.f1 - t.f1) / t.f1 < tol && std::abs(m.f2 - t.f2) / t.f2 < tol &&
         std::abs(m.lambda1 - t.lambda1) < tol && std::abs(m.lambda2 - t.lambda2) < tol &&
         std::abs(2.0 * std::atan(m.s) - 2.0 * std::atan(t.s)) < tol;
}

inline bool contains_truth(const SolverCandidateSet& set, const Truth& t, double tol = 1e-6) {
  return std::any_of(set.candidates.begin(), set.candidates.end(),
                     [&](const StitchModel& m) { return matches(m, t, tol); });
}

}  // namespace gravpano::testing
