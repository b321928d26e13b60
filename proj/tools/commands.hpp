#pragma once

#include "config.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace porehom::app {

enum ExitCode : int { kPass = 0, kSolverFailure = 1, kConfigError = 2, kGateFailure = 3 };

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> out_dir;  // overrides output.dir
  int threads = 1;
  std::optional<std::uint64_t> seed;
  bool timings = false;  // adds wall-clock columns (breaks bitwise reproducibility)
};

/// Loads, overrides and validates; throws ConfigError.
RunConfig prepare_config(const CommandOptions& opts);

int run_cell(const RunConfig& c, const CommandOptions& opts, std::ostream& log);
int run_micro(const RunConfig& c, const CommandOptions& opts, std::ostream& log);
int run_macro(const RunConfig& c, const CommandOptions& opts, std::ostream& log);
int run_study(const RunConfig& c, const CommandOptions& opts, std::ostream& log);
int run_unfold(const RunConfig& c, const CommandOptions& opts, std::ostream& log);
int run_geometry_dump(const RunConfig& c, const CommandOptions& opts, std::ostream& log);

/// Loads the config and dispatches; maps exceptions to exit codes.
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& log);

}  // namespace porehom::app
