#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ltqp::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kFatal = 2, kTimeout = 3 };

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ltqp::cli
