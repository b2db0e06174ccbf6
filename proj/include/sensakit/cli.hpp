#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sensakit {

/// Exit codes of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_runtime = 2 };

/// Run the CLI on `args` (without the program name). Normal output goes
/// to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sensakit
