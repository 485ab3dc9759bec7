#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace greentune::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUser = 2,
};

/// Parses the command line and runs one subcommand. Progress and summaries
/// go to `out`; failures print a single `error: ...` line to `err`.
/// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace greentune::cli
