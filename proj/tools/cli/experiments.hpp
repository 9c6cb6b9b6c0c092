#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "cli/config.hpp"

namespace switchjump::cli {

enum class Experiment { simulate, check_assumptions, dynkin, periodicity, series_vs_oracle, cesaro };

const char* to_string(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& name);

enum ExitCode : int { kPass = 0, kUsage = 1, kStatFail = 2 };

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> paths;
  bool quiet = false;
  // Fixed header timestamp; empty means the current UTC time.
  std::string timestamp;
};

// Runs the experiment on an already parsed config. Errors propagate.
int run_experiment(Experiment kind, Config config, const RunOptions& options, std::ostream& log);

// Loads the config and runs; configuration and usage errors map to kUsage
// with the message on `err`.
int run(Experiment kind, const RunOptions& options, std::ostream& log, std::ostream& err);

}  // namespace switchjump::cli
