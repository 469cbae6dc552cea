#pragma once

#include "orbitlab/cli/config.hpp"
#include "orbitlab/cli/output.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace orbitlab::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kConfigError = 2, kNumericalFailure = 3 };

struct Context {
  std::filesystem::path out_dir = ".";
  std::ostream* log = nullptr;  // receives the list of written files
};

/// Rows t = -backward..forward for one initial state. Alternating play runs
/// on the extended-precision path; phi follows the configured invariant
/// (NaN columns when there is none). Throws NumericalError with the step
/// index on breakdown.
std::vector<TrajectoryRow> simulate_trajectory(const RunConfig& cfg, const State& x0);

// Each command writes its files into ctx.out_dir and returns an exit code.
// Config problems surface as ConfigError, numerical ones as NumericalError
// or InversionError; run() maps them to exit codes.
int cmd_simulate(const RunConfig& cfg, const Context& ctx);
int cmd_invariant(const RunConfig& cfg, const Context& ctx);
int cmd_classify(const RunConfig& cfg, const Context& ctx);
int cmd_scan(const RunConfig& cfg, const Context& ctx);
int cmd_figures(const std::string& which, std::size_t steps, const Context& ctx);

/// Full command line entry point (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace orbitlab::cli
