#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dfo/core.hpp"
#include "dfo/nature.hpp"
#include "dfo/stats.hpp"

namespace dfo::experiment {

inline constexpr std::string_view kVersion = "1.0.0";

struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

struct ExperimentConfig {
  std::string suite = "shifted";
  std::vector<int> dims{5};
  std::vector<std::string> algorithms{"pso", "de", "lshade", "dir", "dir_l", "dir_gl", "dirmin"};
  // Optional filter on base function names; empty means the whole suite.
  std::vector<std::string> problems;
  int runs = 30;
  std::uint64_t base_seed = 1;
  double maxfes_scale = 1.0;
  std::filesystem::path out_dir = "results";
  int jobs = 1;
  nature::AlgorithmParams params;
  double direct_epsilon = 1e-4;
  double local_budget_fraction = 0.05;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  std::int64_t budget_for(int dim) const { return maxfes_for(dim, maxfes_scale); }
  /// 1 for DIRECT variants, `runs` otherwise.
  int runs_for(std::string_view algorithm) const;
};

/// Parses the JSON config. Unknown keys and ill-typed values raise
/// ConfigError naming the key (dotted path for nested overrides).
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_json(const ExperimentConfig& config);

struct Manifest {
  std::filesystem::path out_dir;
  std::vector<std::string> files;  // relative to out_dir, sorted
  std::string json;
};

/// Runs every (problem, dim, algorithm, run) job, `config.jobs` at a time.
/// Records come back in canonical order whatever the scheduling.
std::vector<RunRecord> execute(const ExperimentConfig& config);

/// execute() followed by write_outputs().
Manifest run_experiment(const ExperimentConfig& config);

/// Writes results, trajectories, derived tables, plots and manifest.json.
Manifest write_outputs(const ExperimentConfig& config, const std::vector<RunRecord>& records);

/// Reloads config, results.csv and trajectories from `out_dir` and rewrites
/// every derived file.
Manifest report(const std::filesystem::path& out_dir);

/// Friedman statistics at each of the eight checkpoints. Each instance
/// (problem, dim) contributes one row holding every algorithm's median
/// snapped error over its runs.
std::vector<stats::FriedmanResult> stage_friedman(const std::vector<RunRecord>& records,
                                                  const std::vector<std::string>& algorithms);

/// Invariant checks on tiny instances, one line per check. Returns the
/// number of failures.
int verify(std::ostream& out);

}  // namespace dfo::experiment
