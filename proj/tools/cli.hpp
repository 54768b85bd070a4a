#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rusamp::cli {

enum ExitCode : int { ok = 0, config_error = 2, quality_failure = 3 };

/// Runs the command line given without the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rusamp::cli
