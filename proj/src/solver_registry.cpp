#include <array>

#include "solver_common.hpp"

namespace gravpano {

namespace {

struct SolverInfo {
  SolverId id;
  std::string_view name;
  int sample;
  int raw;
  int candidates;
  bool distortion;
  bool aligned;
};

constexpr std::array<SolverInfo, 9> kSolvers = {{
    {SolverId::kH1f, "h1f", 1, 4, 4, false, false},
    {SolverId::kH2f1f2, "h2f1f2", 2, 4, 4, false, false},
    {SolverId::kH2lambda, "h2lambda", 2, 8, 6, true, false},
    {SolverId::kH3l1l2, "h3l1l2", 3, 6, 6, true, false},
    {SolverId::kH1fAligned, "h1f_aligned", 1, 2, 2, false, true},
    {SolverId::kH2f1f2Aligned, "h2f1f2_aligned", 2, 2, 2, false, true},
    {SolverId::kH2lambdaAligned, "h2lambda_aligned", 2, 2, 2, true, true},
    {SolverId::kH3l1l2Aligned, "h3l1l2_aligned", 3, 2, 2, true, true},
    {SolverId::kH4dlt, "h4dlt", 4, 1, 1, false, false},
}};

const SolverInfo& info(SolverId id) { return kSolvers[static_cast<std::size_t>(id)]; }

}  // namespace

std::string_view solver_name(SolverId id) { return info(id).name; }

std::optional<SolverId> parse_solver(std::string_view name) {
  for (const auto& s : kSolvers) {
    if (s.name == name) return s.id;
  }
  return std::nullopt;
}

int sample_size(SolverId id) { return info(id).sample; }
int max_raw_solutions(SolverId id) { return info(id).raw; }
int max_candidates(SolverId id) { return info(id).candidates; }
bool estimates_distortion(SolverId id) { return info(id).distortion; }
bool is_aligned(SolverId id) { return info(id).aligned; }

SolverId aligned_variant(SolverId id) {
  switch (id) {
    case SolverId::kH1f:
      return SolverId::kH1fAligned;
    case SolverId::kH2f1f2:
      return SolverId::kH2f1f2Aligned;
    case SolverId::kH2lambda:
      return SolverId::kH2lambdaAligned;
    case SolverId::kH3l1l2:
      return SolverId::kH3l1l2Aligned;
    case SolverId::kH4dlt:
      throw InvalidInput("h4dlt has no aligned variant");
    default:
      return id;
  }
}

bool positive_depth(const StitchModel& m, const Correspondence& c) {
  const double z1 = 1.0 + m.lambda1 * c.p1.radius2();
  const double z2 = 1.0 + m.lambda2 * c.p2.radius2();
  if (!(z1 > 0.0) || !(z2 > 0.0)) return false;
  const double f1n = m.f1 / c.p1.norm_scale;
  const Vec3 ray(c.p1.x() / f1n, c.p1.y() / f1n, z1);
  return (m.relative_rotation() * ray).z() > 0.0;
}

SolverCandidateSet solve(SolverId id, std::span<const Correspondence> cs,
                         const SolverOptions& opts) {
  const int m = sample_size(id);
  if (static_cast<int>(cs.size()) < m) {
    throw InvalidInput(std::string(solver_name(id)) + ": needs " + std::to_string(m) +
                       " correspondences");
  }
  SolverCandidateSet out;
  switch (id) {
    case SolverId::kH1f:
      out = solve_h1f(cs[0], opts);
      break;
    case SolverId::kH2f1f2:
      out = solve_h2f1f2(cs[0], cs[1], opts);
      break;
    case SolverId::kH2lambda:
      out = solve_h2lambda(cs[0], cs[1], opts);
      break;
    case SolverId::kH3l1l2:
      out = solve_h3l1l2(cs[0], cs[1], cs[2], opts);
      break;
    case SolverId::kH4dlt: {
      out.solver_id = id;
      out.raw_count = 1;
      const Mat3 H = solve_h4dlt(cs.first(m));
      if (auto model = model_from_homography(H, cs[0].g1, cs[0].g2)) {
        out.candidates.push_back(*model);
        out.residuals.push_back(0.0);
      }
      break;
    }
    default:
      out = solve_aligned(id, cs.first(m), opts);
      break;
  }
  return out;
}

}  // namespace gravpano
