#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace moplan {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,      // bad flags, weights, key-value files, shapes or ranges
  kExitIo = 3,          // unreadable or malformed files
  kExitInfeasible = 4,  // no path, banned endpoint
  kExitConstraint = 5,  // no database record within a mission bound
};

int exit_code_for(const std::exception& e);

/// Runs one subcommand. `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace moplan
