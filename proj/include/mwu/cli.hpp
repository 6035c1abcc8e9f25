#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mwu {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitPrecondition = 2 };

/// Runs the tool on `args` (program name excluded), writing results and
/// help to `out` and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace mwu
