#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entwine {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,             // success, or NO_VIOLATION_FOUND
  kExitInternal = 1,       // unexpected fault
  kExitInvalidInput = 2,   // parse or validation error
  kExitViolated = 3,       // optimality condition violated
};

/// Runs the `entwine` command line. `args` excludes the program name.
/// Machine-readable output goes to --out when given, else to `out`; the
/// human-readable report goes to `out` when --out is given, else to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entwine
