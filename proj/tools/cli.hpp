#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gravpano::cli {

enum ExitCode {
  kOk = 0,
  kParse = 2,
  kDegenerate = 3,
  kNoSolution = 4,
  kNoModel = 5,
  kUnwritable = 6,
};

/// Runs the command line `args` (without the program name), writing results
/// to `out` and diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gravpano::cli
