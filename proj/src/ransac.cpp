#include "gravpano/ransac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include <ceres/ceres.h>

#include "gravpano/errors.hpp"
#include "gravpano/synthbench.hpp"
#include "parallel.hpp"

namespace gravpano {

namespace {

// Forward and backward transfer residuals of one correspondence.
struct TransferResidual {
  double u1, v1, u2, v2, ns;
  Mat3 R1, R2;

  template <class T>
  static bool project(const Eigen::Matrix<T, 3, 3>& R, const T& x, const T& y, const T& z,
                      const T& f_from, const T& f_to, const T& lambda_to, double ns, T& pu,
                      T& pv) {
    const Eigen::Matrix<T, 3, 1> ray(x / f_from, y / f_from, z);
    const Eigen::Matrix<T, 3, 1> Y = R * ray;
    if (!(Y(2) > T(0.0))) return false;
    const T xu = f_to * Y(0) / Y(2);
    const T yu = f_to * Y(1) / Y(2);
    const T disc = T(1.0) - T(4.0) * lambda_to * (xu * xu + yu * yu);
    if (!(disc >= T(0.0))) return false;
    const T k = T(2.0) / (T(1.0) + sqrt(disc));
    pu = k * xu * ns;
    pv = k * yu * ns;
    return true;
  }

  template <class T>
  bool operator()(const T* a, const T* l, T* r) const {
    using std::cos;
    using std::sin;
    const T c = cos(a[0]);
    const T s = sin(a[0]);
    Eigen::Matrix<T, 3, 3> Ry;
    Ry << c, T(0.0), s, T(0.0), T(1.0), T(0.0), -s, T(0.0), c;
    const Eigen::Matrix<T, 3, 3> R = R2.transpose().cast<T>() * Ry * R1.cast<T>();
    const T x1(u1 / ns), y1(v1 / ns), x2(u2 / ns), y2(v2 / ns);
    const T z1 = T(1.0) + l[0] * (x1 * x1 + y1 * y1);
    const T z2 = T(1.0) + l[1] * (x2 * x2 + y2 * y2);
    T pu, pv, qu, qv;
    if (!project<T>(R, x1, y1, z1, a[1], a[2], l[1], ns, pu, pv)) return false;
    if (!project<T>(Eigen::Matrix<T, 3, 3>(R.transpose()), x2, y2, z2, a[2], a[1], l[0], ns, qu, qv)) {
      return false;
    }
    r[0] = pu - u2;
    r[1] = pv - v2;
    r[2] = qu - u1;
    r[3] = qv - v1;
    return true;
  }
};

TransferResidual make_residual(const Correspondence& c, const StitchModel& base) {
  return {c.p1.u, c.p1.v, c.p2.u, c.p2.v, c.p1.norm_scale, base.R1, base.R2};
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

namespace refine {

Params to_params(const StitchModel& m, double ns) {
  Params x;
  x << 2.0 * std::atan(m.s), m.f1 / ns, m.f2 / ns, m.lambda1, m.lambda2;
  return x;
}

StitchModel from_params(const Params& x, const StitchModel& base, double ns) {
  return compose_model(std::tan(0.5 * x(0)), x(1) * ns, x(2) * ns, x(3), x(4),
                       GravityPrior{base.R1}, GravityPrior{base.R2});
}

bool evaluate(std::span<const Correspondence> cs, const Params& x, const StitchModel& base,
              Eigen::VectorXd& residuals, Eigen::MatrixXd* jacobian) {
  using J = ceres::Jet<double, 5>;
  const Eigen::Index n = static_cast<Eigen::Index>(cs.size());
  residuals.resize(4 * n);
  if (jacobian) jacobian->resize(4 * n, 5);
  J a[3], l[2];
  for (int k = 0; k < 3; ++k) a[k] = J(x(k), k);
  for (int k = 0; k < 2; ++k) l[k] = J(x(3 + k), 3 + k);
  for (Eigen::Index i = 0; i < n; ++i) {
    J r[4];
    if (!make_residual(cs[i], base)(a, l, r)) return false;
    for (int k = 0; k < 4; ++k) {
      residuals(4 * i + k) = r[k].a;
      if (jacobian) jacobian->row(4 * i + k) = r[k].v.transpose();
    }
  }
  return true;
}

double cost(std::span<const Correspondence> cs, const StitchModel& m) {
  if (cs.empty()) return 0.0;
  Eigen::VectorXd r;
  const double ns = cs.front().p1.norm_scale;
  if (!evaluate(cs, to_params(m, ns), m, r, nullptr)) return kInf;
  return 0.5 * r.squaredNorm();
}

}  // namespace refine

RefineResult refine_nonminimal(std::span<const Correspondence> inliers, const StitchModel& initial,
                               RefineMode mode, int max_iterations) {
  if (inliers.empty()) throw InvalidInput("refine_nonminimal: no correspondences");
  if (!initial.parametric) throw InvalidInput("refine_nonminimal: initial model is not parametric");
  const double ns = inliers.front().p1.norm_scale;
  RefineResult out;
  out.model = initial;
  out.initial_cost = refine::cost(inliers, initial);
  out.final_cost = out.initial_cost;
  if (!std::isfinite(out.initial_cost)) return out;

  const refine::Params x0 = refine::to_params(initial, ns);
  double a[3] = {x0(0), x0(1), x0(2)};
  double l[2] = {x0(3), x0(4)};
  ceres::Problem problem;
  for (const auto& c : inliers) {
    problem.AddResidualBlock(
        new ceres::AutoDiffCostFunction<TransferResidual, 4, 3, 2>(
            new TransferResidual(make_residual(c, initial))),
        nullptr, a, l);
  }
  problem.SetParameterLowerBound(a, 1, 1e-9);
  problem.SetParameterLowerBound(a, 2, 1e-9);
  if (mode == RefineMode::kNoDistortion) problem.SetParameterBlockConstant(l);

  ceres::Solver::Options opts;
  opts.minimizer_type = ceres::TRUST_REGION;
  opts.trust_region_strategy_type = ceres::LEVENBERG_MARQUARDT;
  opts.linear_solver_type = ceres::DENSE_QR;
  opts.max_num_iterations = max_iterations;
  opts.function_tolerance = 1e-16;
  opts.gradient_tolerance = 1e-14;
  opts.parameter_tolerance = 1e-14;
  opts.num_threads = 1;
  opts.logging_type = ceres::SILENT;
  opts.minimizer_progress_to_stdout = false;
  ceres::Solver::Summary summary;
  ceres::Solve(opts, &problem, &summary);

  refine::Params x;
  x << a[0], a[1], a[2], l[0], l[1];
  out.iterations = static_cast<int>(summary.iterations.size());
  out.converged = summary.termination_type == ceres::CONVERGENCE;
  if (!x.allFinite() || !(x(1) > 0.0) || !(x(2) > 0.0)) return out;
  StitchModel refined = refine::from_params(x, initial, ns);
  const double c = refine::cost(inliers, refined);
  if (c <= out.initial_cost) {
    out.model = refined;
    out.final_cost = c;
  }
  return out;
}

int iteration_budget(double confidence, double inlier_ratio, int sample_size, int max_iterations) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidInput("confidence must lie in (0, 1)");
  if (sample_size < 1) throw InvalidInput("sample size must be positive");
  if (max_iterations < 1) throw InvalidInput("max_iterations must be positive");
  if (!(inlier_ratio > 0.0)) return max_iterations;
  if (inlier_ratio >= 1.0) return 1;
  const double p_good = std::pow(inlier_ratio, sample_size);
  const double denom = std::log1p(-p_good);
  if (!(denom < 0.0)) return max_iterations;
  const double n = std::ceil(std::log(1.0 - confidence) / denom);
  if (!(n < static_cast<double>(max_iterations))) return max_iterations;
  return std::max(1, static_cast<int>(n));
}

namespace {

struct Scored {
  double score = -1.0;
  int inliers = 0;
};

Scored score_model(std::span<const Correspondence> cs, const StitchModel& m, const RansacConfig& cfg,
                   std::vector<bool>* mask) {
  Scored s{0.0, 0};
  const double t = cfg.inlier_threshold;
  if (mask) mask->assign(cs.size(), false);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const double e = transfer_error(m, cs[i], TransferMode::kSymmetric);
    if (!(e <= t)) continue;
    ++s.inliers;
    if (mask) (*mask)[i] = true;
    s.score += cfg.scoring == ScoringMode::kInlierCount ? 1.0 : 1.0 - (e * e) / (t * t);
  }
  return s;
}

struct Hypothesis {
  std::optional<StitchModel> model;
  Scored scored;
};

// Fits, on inliers, the model used for local optimization.
std::optional<StitchModel> local_fit(std::span<const Correspondence> cs, const std::vector<bool>& mask,
                                     const StitchModel& current, SolverId id, int m) {
  std::vector<Correspondence> in;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (mask[i]) in.push_back(cs[i]);
  }
  if (static_cast<int>(in.size()) < std::max(m + 1, kMinInliers)) return std::nullopt;
  try {
    if (id == SolverId::kH4dlt || !current.parametric) {
      return model_from_homography(solve_h4dlt(in), cs.front().g1, cs.front().g2);
    }
    const RefineMode mode = estimates_distortion(id) ? RefineMode::kDistortion : RefineMode::kNoDistortion;
    return refine_nonminimal(in, current, mode).model;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

RansacResult ransac(std::span<const Correspondence> cs, SolverId id, const RansacConfig& cfg) {
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) throw InvalidInput("confidence must lie in (0, 1)");
  if (!(cfg.inlier_threshold > 0.0)) throw InvalidInput("inlier threshold must be positive");
  if (cfg.max_iterations < 1) throw InvalidInput("max_iterations must be positive");
  const int m = cfg.min_sample_size > 0 ? cfg.min_sample_size : sample_size(id);
  if (m < sample_size(id)) throw InvalidInput("sample size below the solver's minimum");
  const int n = static_cast<int>(cs.size());
  if (n < m) throw InvalidInput("fewer correspondences than the minimal sample");

  auto hypothesis = [&](int iteration) {
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(iteration), 1));
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::vector<int> idx;
    idx.reserve(m);
    std::sample(all.begin(), all.end(), std::back_inserter(idx), m, rng);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<Correspondence> sample;
    for (int k : idx) sample.push_back(cs[k]);
    Hypothesis h;
    SolverCandidateSet cands;
    try {
      cands = solve(id, sample, cfg.solver_options);
    } catch (const Error&) {
      return h;
    }
    for (const auto& cand : cands.candidates) {
      const Scored s = score_model(cs, cand, cfg, nullptr);
      if (!h.model || s.score > h.scored.score) {
        h.model = cand;
        h.scored = s;
      }
    }
    return h;
  };

  const int threads = cfg.threads > 0 ? cfg.threads : worker_count();
  const int batch = std::max(1, threads) * 4;
  int budget = cfg.max_iterations;
  std::optional<StitchModel> best;
  Scored best_score;
  std::vector<bool> best_mask;
  int iterations = 0;
  int lo_rounds = 0;

  while (iterations < budget) {
    const int count = std::min(batch, budget - iterations);
    std::vector<Hypothesis> hs(count);
    detail::parallel_for(static_cast<std::size_t>(count), threads,
                         [&](std::size_t k) { hs[k] = hypothesis(iterations + static_cast<int>(k)); });
    for (int k = 0; k < count && iterations < budget; ++k) {
      ++iterations;
      Hypothesis& h = hs[k];
      if (!h.model || !(h.scored.score > best_score.score)) continue;
      best = h.model;
      best_score = score_model(cs, *best, cfg, &best_mask);
      if (cfg.lo_enabled) {
        for (int round = 0; round < cfg.lo_max_rounds; ++round) {
          const auto fit = local_fit(cs, best_mask, *best, id, m);
          if (!fit) break;
          std::vector<bool> mask;
          const Scored s = score_model(cs, *fit, cfg, &mask);
          ++lo_rounds;
          if (!(s.score > best_score.score)) break;
          best = fit;
          best_score = s;
          best_mask = std::move(mask);
        }
      }
      budget = std::min(cfg.max_iterations,
                        iteration_budget(cfg.confidence, static_cast<double>(best_score.inliers) / n, m,
                                         cfg.max_iterations));
    }
  }

  if (!best || best_score.inliers < kMinInliers) {
    throw NoModel("no model reached the minimum inlier count",
                  static_cast<std::size_t>(best ? best_score.inliers : 0),
                  static_cast<std::size_t>(iterations));
  }
  RansacResult out;
  out.model = *best;
  out.score = best_score.score;
  out.inlier_count = best_score.inliers;
  out.inlier_mask = std::move(best_mask);
  out.iterations_run = iterations;
  out.lo_rounds = lo_rounds;
  return out;
}

}  // namespace gravpano
