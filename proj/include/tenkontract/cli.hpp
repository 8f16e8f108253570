#pragma once

#include <string>
#include <vector>

namespace tenkontract::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kResourceError = 3 };

/// Runs one subcommand; argv[0] is the program name.
int run(const std::vector<std::string>& argv);

}  // namespace tenkontract::cli
