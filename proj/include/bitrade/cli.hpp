#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bitrade {

/// Exit codes of the command-line harness.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitBadFlags = 2,
  kExitModeMismatch = 3,
  kExitGeometry = 4,
};

/// Runs `bitrade <args...>` (args exclude the program name), writing
/// normal output to `out` and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bitrade
