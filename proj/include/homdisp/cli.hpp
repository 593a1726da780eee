#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace homdisp {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitSchema = 2,         ///< malformed or invalid input file
  kExitPhysics = 3,        ///< physically invalid request (grid, window, ranges)
  kExitNonConvergence = 4,
  kExitDipNotFound = 5,
  kExitInfeasibleWidth = 6,
};

/// Runs one `homdisp` invocation. args excludes the program name. Machine
/// output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace homdisp
