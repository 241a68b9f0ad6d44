#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wigner1d::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kUsage = 2,      // bad flags, bad config keys, violated preconditions
  kNumerical = 3,  // convergence failures and estimates that came out unusable
};

/// Runs one subcommand. `args` excludes the program name. Artifacts go to
/// `out` unless --out names a file; diagnostics go to `err` as one JSON line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Markdown reference of every subcommand and flag, generated from the parser.
std::string reference_markdown();

}  // namespace wigner1d::cli
