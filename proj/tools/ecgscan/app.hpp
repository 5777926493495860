#pragma once

#include <string>
#include <vector>

namespace ecgscan::cli {

/// Parses arguments (without the program name) and runs the subcommand.
/// Returns the process exit code.
int run(const std::vector<std::string>& args);

}  // namespace ecgscan::cli
