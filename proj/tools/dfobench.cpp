// dfobench: run benchmark experiments and regenerate their reports.
//
//   dfobench run config.json [--seed N] [--scale S] [--jobs N]
//   dfobench report out_dir
//   dfobench list-suites [suite] [--dims 2,5]
//   dfobench verify
//
// Exit codes: 0 success, 2 config error, 3 runtime failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dfo/experiment.hpp"
#include "dfo/suites.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free optimization benchmark runner"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<double> scale;
  std::optional<int> jobs;
  app.add_option("--seed", seed, "Override base_seed of the config");
  app.add_option("--scale", scale, "Override maxfes_scale of the config");
  app.add_option("--jobs", jobs, "Parallel run slots");

  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  std::string config_path;
  run->add_option("config", config_path, "Config file")->required();

  auto* rep = app.add_subcommand("report", "Re-derive tables and plots from stored runs");
  std::string out_dir;
  rep->add_option("out_dir", out_dir, "Output directory of a previous run")->required();

  auto* list = app.add_subcommand("list-suites", "List suites, or the instances of one suite as JSON");
  std::string suite_name;
  std::vector<std::size_t> dims{2, 5, 10};
  list->add_option("suite", suite_name, "Suite to describe");
  list->add_option("--dims", dims, "Dimensions to list")->delimiter(',');

  auto* verify = app.add_subcommand("verify", "Run invariant checks on tiny instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) {
      auto config = dfo::experiment::load_config(config_path);
      if (seed) config.base_seed = *seed;
      if (scale) config.maxfes_scale = *scale;
      if (jobs) config.jobs = *jobs;
      config.validate();
      const auto manifest = dfo::experiment::run_experiment(config);
      std::cout << "wrote " << manifest.files.size() << " files to " << manifest.out_dir.string() << '\n';
    } else if (*rep) {
      const auto manifest = dfo::experiment::report(out_dir);
      std::cout << "rewrote " << manifest.files.size() << " files in " << manifest.out_dir.string() << '\n';
    } else if (*list) {
      if (suite_name.empty()) {
        for (const auto& s : dfo::suites::suite_names()) std::cout << s << '\n';
      } else {
        std::cout << dfo::suites::suite_listing_json(suite_name, dims) << '\n';
      }
    } else if (*verify) {
      const int failures = dfo::experiment::verify(std::cout);
      if (failures > 0) {
        std::cerr << failures << " check(s) failed\n";
        return kRuntimeError;
      }
    }
  } catch (const dfo::experiment::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const dfo::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return *list ? kConfigError : kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
