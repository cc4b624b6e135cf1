#pragma once

#include <string>
#include <vector>

namespace fluctrack::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Parses arguments (argv[0] included) and runs one subcommand:
/// simulate, track, metrics, montecarlo, density. Returns the process exit code.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

/// Sets the log level from FLUCTRACK_LOG (error, info, debug). Unknown values keep info.
void configure_logging();

}  // namespace fluctrack::harness
