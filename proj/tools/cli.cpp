#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gravpano/errors.hpp"
#include "gravpano/io.hpp"
#include "gravpano/ransac.hpp"
#include "gravpano/solvers.hpp"
#include "gravpano/synthbench.hpp"

namespace gravpano::cli {

namespace {

using nlohmann::json;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

json model_json(const StitchModel& m) {
  return json{{"s", m.s},           {"theta_deg", m.theta * kRadToDeg},
              {"f1", m.f1},         {"f2", m.f2},
              {"lambda1", m.lambda1}, {"lambda2", m.lambda2}};
}

SolverId pick_solver(const std::string& name, std::size_t rows, bool aligned) {
  SolverId id;
  if (name == "auto") {
    id = rows == 1 ? SolverId::kH1f : rows == 2 ? SolverId::kH2lambda : SolverId::kH3l1l2;
  } else {
    const auto parsed = parse_solver(name);
    if (!parsed) throw InvalidInput("unknown solver '" + name + "'");
    id = *parsed;
  }
  return aligned ? aligned_variant(id) : id;
}

struct SolveArgs {
  std::string file;
  std::string solver = "auto";
  bool aligned = false;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const CorrespondenceFile f = read_correspondence_file(a.file);
  const SolverId id = pick_solver(a.solver, f.rows.size(), a.aligned);
  if (f.rows.size() < static_cast<std::size_t>(sample_size(id))) {
    throw InvalidInput(std::string(solver_name(id)) + " needs " + std::to_string(sample_size(id)) +
                       " rows, file has " + std::to_string(f.rows.size()));
  }
  const auto cs = f.correspondences();
  const SolverCandidateSet set = solve(id, cs);
  if (set.candidates.empty()) return kNoSolution;
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    json j = model_json(set.candidates[i]);
    j["solver"] = solver_name(id);
    j["residual"] = set.residuals[i];
    out << j.dump() << '\n';
  }
  return kOk;
}

struct RansacArgs {
  std::string file;
  std::string solver = "h1f";
  bool aligned = false;
  double threshold = 3.0;
  double confidence = 0.99;
  std::uint64_t seed = 0;
  bool lo = true;
  int max_iterations = 10000;
  bool timing = false;
};

int cmd_ransac(const RansacArgs& a, std::ostream& out, std::ostream& err) {
  const CorrespondenceFile f = read_correspondence_file(a.file);
  const SolverId id = pick_solver(a.solver, f.rows.size(), a.aligned);
  const std::size_t need = std::max<std::size_t>(kMinInliers, sample_size(id));
  if (f.rows.size() < need) {
    throw InvalidInput("robust estimation needs at least " + std::to_string(need) + " rows");
  }
  RansacConfig cfg;
  cfg.inlier_threshold = a.threshold;
  cfg.confidence = a.confidence;
  cfg.seed = a.seed;
  cfg.lo_enabled = a.lo;
  cfg.max_iterations = a.max_iterations;
  const auto cs = f.correspondences();
  const auto t0 = std::chrono::steady_clock::now();
  const RansacResult r = ransac(cs, id, cfg);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  std::vector<int> inliers;
  for (std::size_t i = 0; i < r.inlier_mask.size(); ++i) {
    if (r.inlier_mask[i]) inliers.push_back(static_cast<int>(i));
  }
  json j{{"solver", solver_name(id)}, {"model", model_json(r.model)},
         {"inlier_count", r.inlier_count}, {"inliers", inliers},
         {"iterations", r.iterations_run}, {"lo_rounds", r.lo_rounds}, {"score", r.score}};
  if (a.timing) j["wall_time_ms"] = ms;
  out << j.dump() << '\n';
  err << "wall_time_ms: " << ms << '\n';
  return kOk;
}

struct BenchArgs {
  std::string preset;
  int trials = 1000;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool timing = false;
};

// Opens `path` for writing or throws a filesystem error.
std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::filesystem::filesystem_error("cannot write", path,
                                            std::make_error_code(std::errc::permission_denied));
  }
  return os;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  namespace fs = std::filesystem;
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  auto emit = [&](const std::string& name, const std::string& content, std::size_t rows) {
    std::ofstream os = open_output(dir / name);
    os << content;
    os.flush();
    if (!os) {
      throw fs::filesystem_error("write failed", dir / name,
                                 std::make_error_code(std::errc::io_error));
    }
    out << json{{"file", (dir / name).string()}, {"rows", rows}}.dump() << '\n';
  };
  // Probe writability before doing any work.
  {
    const fs::path probe = dir / ".gravpano_write_test";
    open_output(probe).close();
    fs::remove(probe);
  }

  if (a.preset == "iterations") {
    std::ostringstream os;
    os << "outlier_ratio,sample_size,iterations\n";
    std::size_t rows = 0;
    for (int k = 0; k <= 18; ++k) {
      const double outlier = 0.05 * k;
      for (int m = 1; m <= 6; ++m) {
        os << k * 5 / 100.0 << ',' << m << ',' << iteration_budget(0.99, 1.0 - outlier, m) << '\n';
        ++rows;
      }
    }
    emit("iterations.csv", os.str(), rows);
    return kOk;
  }

  SceneConfig cfg;
  cfg.n_trials = a.trials;
  cfg.seed = a.seed;
  cfg.record_timing = a.timing;
  std::vector<SolverId> solvers;
  if (a.preset == "fig3a") {
    solvers = {SolverId::kH1f, SolverId::kH2f1f2, SolverId::kH4dlt};
  } else if (a.preset == "fig3b") {
    solvers = {SolverId::kH2lambda, SolverId::kH3l1l2};
    cfg.lambda1_gt = cfg.lambda2_gt = -0.4;
  } else {
    throw InvalidInput("unknown preset '" + a.preset + "'");
  }
  struct Sweep {
    const char* name;
    SweepKind kind;
    std::vector<double> levels;
    double image_noise;
  };
  const std::vector<double> angles{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  const Sweep sweeps[] = {
      {"image_noise", SweepKind::kImageNoise, {0.0, 0.5, 1.0, 1.5, 2.0}, 0.0},
      {"roll_noise", SweepKind::kRollNoise, angles, 2.0},
      {"pitch_noise", SweepKind::kPitchNoise, angles, 2.0},
  };
  for (const auto& sw : sweeps) {
    SceneConfig c = cfg;
    c.image_noise_sigma = sw.image_noise;
    const auto records = run_sweep(c, sw.kind, sw.levels, solvers);
    std::ostringstream os;
    write_trials_csv(os, records);
    emit(a.preset + "_" + sw.name + ".csv", os.str(), records.size());
    for (SolverId id : solvers) {
      std::vector<TrialRecord> mine;
      for (const auto& r : records) {
        if (r.solver_id == id) mine.push_back(r);
      }
      if (mine.empty()) continue;
      const auto cdf = aggregate_cdf(mine, RecordField::kFocal);
      std::ostringstream cs;
      write_cdf_csv(cs, cdf);
      emit(a.preset + "_" + sw.name + "_" + std::string(solver_name(id)) + "_focal_cdf.csv", cs.str(),
           cdf.size());
    }
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gravity-prior minimal solvers for panoramic stitching", "gravpano"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "List minimal-solver candidates for a correspondence file");
  solve_cmd->add_option("file", sa.file, "Correspondence file")->required();
  solve_cmd->add_option("--solver", sa.solver, "h1f|h2f1f2|h2lambda|h3l1l2|auto")
      ->check(CLI::IsMember({"h1f", "h2f1f2", "h2lambda", "h3l1l2", "auto"}));
  solve_cmd->add_flag("--aligned", sa.aligned, "Use the gravity-aligned solver variants");

  RansacArgs ra;
  auto* ransac_cmd = app.add_subcommand("ransac", "Robust estimation with locally optimized RANSAC");
  ransac_cmd->add_option("file", ra.file, "Correspondence file")->required();
  ransac_cmd->add_option("--solver", ra.solver, "h1f|h2f1f2|h2lambda|h3l1l2|h4dlt")
      ->check(CLI::IsMember({"h1f", "h2f1f2", "h2lambda", "h3l1l2", "h4dlt"}));
  ransac_cmd->add_flag("--aligned", ra.aligned, "Use the gravity-aligned solver variants");
  ransac_cmd->add_option("--threshold", ra.threshold, "Inlier threshold in pixels")
      ->check(CLI::PositiveNumber);
  ransac_cmd->add_option("--confidence", ra.confidence, "Termination confidence")
      ->check(CLI::Range(0.0, 1.0));
  ransac_cmd->add_option("--seed", ra.seed, "Random seed");
  ransac_cmd->add_flag("--lo,!--no-lo", ra.lo, "Local optimization (default on)");
  ransac_cmd->add_option("--max-iterations", ra.max_iterations, "Iteration cap")
      ->check(CLI::PositiveNumber);
  ransac_cmd->add_flag("--timing", ra.timing, "Include wall time in the JSON output");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Synthetic benchmark sweeps");
  bench_cmd->add_option("--preset", ba.preset, "fig3a|fig3b|iterations")
      ->required()
      ->check(CLI::IsMember({"fig3a", "fig3b", "iterations"}));
  bench_cmd->add_option("--trials", ba.trials, "Trials per level")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", ba.seed, "Random seed");
  bench_cmd->add_option("--out", ba.out_dir, "Output directory")->required();
  bench_cmd->add_flag("--timing", ba.timing, "Record solve times (output is then not reproducible)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(sa, out);
    if (ransac_cmd->parsed()) return cmd_ransac(ra, out, err);
    return cmd_bench(ba, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const DegenerateConfiguration& e) {
    err << "degenerate: " << e.what() << '\n';
    return kDegenerate;
  } catch (const NoModel& e) {
    err << "no model: " << e.what() << " (best inliers " << e.best_inliers() << ", iterations "
        << e.iterations() << ")\n";
    return kNoModel;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << '\n';
    return kUnwritable;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  }
}

}  // namespace gravpano::cli
