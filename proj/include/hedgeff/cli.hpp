#pragma once

#include <atomic>
#include <iosfwd>
#include <string>
#include <string_view>

#include "hedgeff/config.hpp"

namespace hedgeff {

inline constexpr std::string_view kVersion = "0.1.0";

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "HEDGEFF_OUTPUT_DIR";

/// Raised by the signal handler installed in the command-line tool; running
/// experiments stop at the next block of paths.
std::atomic<bool>& interrupt_flag();

/// Where results go: `output` if set, else <command>.csv; relative paths are
/// resolved against $HEDGEFF_OUTPUT_DIR when it is set.
std::string resolve_output_path(const ExperimentConfig& config);

/// Renders the CSV body for the configured command (no metadata).
std::string render_body(const ExperimentConfig& config, std::ostream& log);

/// Runs the experiment and writes metadata plus CSV atomically (through a
/// .partial file that is removed on failure). Returns 0, or 1 on a runtime
/// error.
int dispatch(const ExperimentConfig& config, std::ostream& log);

/// Entry point of the hedgeff_cli tool. Exit codes: 0 success, 1 runtime
/// error, 2 configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hedgeff
