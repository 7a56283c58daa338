#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sevsteps/cli/config.hpp"

namespace sevsteps::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitToleranceFailure = 2;

/// rates | qualitative | regularisation | inequalities | stability
const std::vector<std::string>& command_names();

/// Runs one command, writes its CSV, SVG and manifest files under
/// config.output and prints a summary.  Returns the process exit code.
int run_command(const std::string& command, const ExperimentConfig& config, std::ostream& out);

/// Full command-line entry point.
int main_entry(int argc, char** argv);

}  // namespace sevsteps::cli
