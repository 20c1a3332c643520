#pragma once

#include <string>
#include <vector>

namespace ensreg {

/// Runs the command-line interface. Exit codes: 0 success, 1 usage error,
/// 2 data/convergence/io error.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

} // namespace ensreg
