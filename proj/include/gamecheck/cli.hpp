#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gamecheck {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitUsage = 2, kExitStateCap = 3 };

// Runs one `gamecheck` command with the given arguments (without the program
// name), writing to out/err. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gamecheck
