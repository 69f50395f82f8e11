#include "dfo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dfo/direct.hpp"
#include "dfo/report.hpp"
#include "dfo/rng.hpp"
#include "dfo/suites.hpp"

namespace dfo::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool known_algorithm(std::string_view a) { return nature::is_nature_algorithm(a) || direct::is_direct_algorithm(a); }

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    bad_key(key, "wrong type");
  }
}

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) bad_key(key, "expected a number");
  return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) bad_key(key, "expected a non-negative integer");
  return j.get<std::size_t>();
}

void parse_pso(const json& j, nature::PsoParams& p) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = "params.pso." + k;
    if (k == "pop") p.pop = get_count(v, key);
    else if (k == "w_max") p.w_max = get_number(v, key);
    else if (k == "w_min") p.w_min = get_number(v, key);
    else if (k == "c1") p.c1 = get_number(v, key);
    else if (k == "c2") p.c2 = get_number(v, key);
    else if (k == "v_max_fraction") p.v_max_fraction = get_number(v, key);
    else bad_key(key, "unknown key");
  }
}

void parse_de(const json& j, nature::DeParams& p) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = "params.de." + k;
    if (k == "pop") p.pop = get_count(v, key);
    else if (k == "F") p.F = get_number(v, key);
    else if (k == "CR") p.CR = get_number(v, key);
    else bad_key(key, "unknown key");
  }
}

void parse_lshade(const json& j, nature::LshadeParams& p) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = "params.lshade." + k;
    if (k == "n_init_per_dim") p.n_init_per_dim = get_number(v, key);
    else if (k == "n_min") p.n_min = get_count(v, key);
    else if (k == "memory_size") p.memory_size = get_count(v, key);
    else if (k == "p_best") p.p_best = get_number(v, key);
    else if (k == "archive_rate") p.archive_rate = get_number(v, key);
    else if (k == "initial_memory") p.initial_memory = get_number(v, key);
    else bad_key(key, "unknown key");
  }
}

void parse_direct(const json& j, ExperimentConfig& c) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = "params.direct." + k;
    if (k == "epsilon") c.direct_epsilon = get_number(v, key);
    else if (k == "local_budget_fraction") c.local_budget_fraction = get_number(v, key);
    else bad_key(key, "unknown key");
  }
}

bool matches_filter(const Problem& p, const std::vector<std::string>& filter) {
  if (filter.empty()) return true;
  for (const auto& f : filter) {
    if (p.name == f || p.name.starts_with(f + "_shift_s") || p.name.starts_with(f + "_rot_s")) return true;
  }
  return false;
}

std::vector<Problem> instances(const ExperimentConfig& config, int dim) {
  std::vector<Problem> out;
  for (auto& p : suites::suite(config.suite, static_cast<std::size_t>(dim))) {
    if (matches_filter(p, config.problems)) out.push_back(std::move(p));
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << content;
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int run_index(const ExperimentConfig& config, const RunRecord& r) {
  if (direct::is_direct_algorithm(r.algorithm)) return 0;
  return static_cast<int>(r.seed - config.base_seed);
}

std::string trajectory_name(const ExperimentConfig& config, const RunRecord& r) {
  return "trajectories/" + r.problem + "_D" + std::to_string(r.dim) + "_" + r.algorithm + "_r" +
         std::to_string(run_index(config, r)) + ".csv";
}

RunRecord run_job(const ExperimentConfig& config, const Problem& problem, const std::string& algorithm, int run) {
  Budget budget{config.budget_for(static_cast<int>(problem.dim))};
  if (direct::is_direct_algorithm(algorithm)) {
    direct::DirectConfig dc{direct::parse_variant(algorithm), config.direct_epsilon, config.local_budget_fraction};
    return direct::run_direct(dc, problem, budget);
  }
  return nature::run_optimizer(algorithm, problem, budget, config.base_seed + static_cast<std::uint64_t>(run),
                               config.params);
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto& names = suites::suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) bad_key("suite", "unknown suite '" + suite + "'");
  if (dims.empty()) bad_key("dims", "must not be empty");
  for (int d : dims) {
    if (d < 2) bad_key("dims", "dimensions must be at least 2");
  }
  if (algorithms.empty()) bad_key("algorithms", "must not be empty");
  std::set<std::string> seen;
  for (const auto& a : algorithms) {
    if (!known_algorithm(a)) bad_key("algorithms", "unknown algorithm '" + a + "'");
    if (!seen.insert(a).second) bad_key("algorithms", "duplicate algorithm '" + a + "'");
  }
  for (const auto& p : problems) {
    bool found = false;
    for (const auto& f : suites::catalog()) found = found || f.name == p;
    if (!found) bad_key("problems", "unknown function '" + p + "'");
  }
  if (runs < 1) bad_key("runs", "must be at least 1");
  if (!(maxfes_scale > 0.0 && maxfes_scale <= 1.0)) bad_key("maxfes_scale", "must lie in (0, 1]");
  for (int d : dims) {
    if (budget_for(d) < 256) bad_key("maxfes_scale", "budget for D=" + std::to_string(d) + " falls below 256");
  }
  if (jobs < 1) bad_key("jobs", "must be at least 1");
  try {
    params.pso.validate();
  } catch (const InvalidArgument& e) {
    bad_key("params.pso", e.what());
  }
  try {
    params.de.validate();
  } catch (const InvalidArgument& e) {
    bad_key("params.de", e.what());
  }
  try {
    params.lshade.validate();
  } catch (const InvalidArgument& e) {
    bad_key("params.lshade", e.what());
  }
  try {
    direct::DirectConfig{direct::Variant::dirmin, direct_epsilon, local_budget_fraction}.validate();
  } catch (const InvalidArgument& e) {
    bad_key("params.direct", e.what());
  }
}

int ExperimentConfig::runs_for(std::string_view algorithm) const {
  return direct::is_direct_algorithm(algorithm) ? 1 : runs;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig c;
  for (const auto& [k, v] : j.items()) {
    if (k == "suite") c.suite = get_as<std::string>(v, k);
    else if (k == "dims") c.dims = get_as<std::vector<int>>(v, k);
    else if (k == "algorithms") c.algorithms = get_as<std::vector<std::string>>(v, k);
    else if (k == "problems") c.problems = get_as<std::vector<std::string>>(v, k);
    else if (k == "runs") c.runs = get_as<int>(v, k);
    else if (k == "base_seed") {
      if (!v.is_number_unsigned()) bad_key(k, "expected a non-negative integer");
      c.base_seed = v.get<std::uint64_t>();
    } else if (k == "maxfes_scale") c.maxfes_scale = get_number(v, k);
    else if (k == "out_dir") c.out_dir = get_as<std::string>(v, k);
    else if (k == "jobs") c.jobs = get_as<int>(v, k);
    else if (k == "params") {
      if (!v.is_object()) bad_key(k, "expected an object");
      for (const auto& [pk, pv] : v.items()) {
        if (!pv.is_object()) bad_key("params." + pk, "expected an object");
        if (pk == "pso") parse_pso(pv, c.params.pso);
        else if (pk == "de") parse_de(pv, c.params.de);
        else if (pk == "lshade") parse_lshade(pv, c.params.lshade);
        else if (pk == "direct") parse_direct(pv, c);
        else bad_key("params." + pk, "unknown key");
      }
    } else bad_key(k, "unknown key");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

std::string config_json(const ExperimentConfig& c) {
  const auto& p = c.params;
  json j;
  j["suite"] = c.suite;
  j["dims"] = c.dims;
  j["algorithms"] = c.algorithms;
  j["problems"] = c.problems;
  j["runs"] = c.runs;
  j["base_seed"] = c.base_seed;
  j["maxfes_scale"] = c.maxfes_scale;
  j["out_dir"] = c.out_dir.generic_string();
  j["jobs"] = c.jobs;
  j["params"]["pso"] = {{"pop", p.pso.pop},     {"w_max", p.pso.w_max}, {"w_min", p.pso.w_min},
                        {"c1", p.pso.c1},       {"c2", p.pso.c2},       {"v_max_fraction", p.pso.v_max_fraction}};
  j["params"]["de"] = {{"pop", p.de.pop}, {"F", p.de.F}, {"CR", p.de.CR}};
  j["params"]["lshade"] = {{"n_init_per_dim", p.lshade.n_init_per_dim}, {"n_min", p.lshade.n_min},
                           {"memory_size", p.lshade.memory_size},       {"p_best", p.lshade.p_best},
                           {"archive_rate", p.lshade.archive_rate},     {"initial_memory", p.lshade.initial_memory}};
  j["params"]["direct"] = {{"epsilon", c.direct_epsilon}, {"local_budget_fraction", c.local_budget_fraction}};
  return j.dump(2);
}

std::vector<RunRecord> execute(const ExperimentConfig& config) {
  config.validate();

  struct Job {
    const Problem* problem;
    const std::string* algorithm;
    int run;
  };
  std::vector<std::vector<Problem>> problems;
  for (int dim : config.dims) problems.push_back(instances(config, dim));
  std::vector<Job> jobs;
  for (const auto& per_dim : problems) {
    for (const auto& p : per_dim) {
      for (const auto& a : config.algorithms) {
        for (int r = 0; r < config.runs_for(a); ++r) jobs.push_back({&p, &a, r});
      }
    }
  }

  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        records[i] = run_job(config, *jobs[i].problem, *jobs[i].algorithm, jobs[i].run);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t slots = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), jobs.size());
  if (slots <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < slots; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

std::vector<stats::FriedmanResult> stage_friedman(const std::vector<RunRecord>& records,
                                                  const std::vector<std::string>& algorithms) {
  if (records.empty()) throw InvalidArgument("stage_friedman: no records");
  std::map<std::string, std::size_t> column;
  for (std::size_t a = 0; a < algorithms.size(); ++a) column[algorithms[a]] = a;

  // (instance, algorithm) -> runs, instances in first-appearance order.
  std::vector<std::pair<std::string, std::size_t>> order;
  std::map<std::pair<std::string, std::size_t>, std::vector<std::vector<const RunRecord*>>> cells;
  for (const auto& r : records) {
    const auto it = column.find(r.algorithm);
    if (it == column.end()) continue;
    const auto key = std::make_pair(r.problem, r.dim);
    auto [cell, inserted] = cells.try_emplace(key, algorithms.size());
    if (inserted) order.push_back(key);
    cell->second[it->second].push_back(&r);
  }

  std::vector<stats::FriedmanResult> out;
  for (std::size_t s = 0; s < kStageCount; ++s) {
    std::vector<std::vector<double>> rows;
    for (const auto& key : order) {
      std::vector<double> row;
      for (std::size_t a = 0; a < algorithms.size(); ++a) {
        const auto& runs = cells[key][a];
        if (runs.empty())
          throw InvalidArgument("stage_friedman: no runs of '" + algorithms[a] + "' on " + key.first);
        std::vector<double> errs;
        for (const RunRecord* r : runs) errs.push_back(snap_error(r->error_at(checkpoint_schedule(r->max_fes)[s])));
        row.push_back(stats::median(errs));
      }
      rows.push_back(std::move(row));
    }
    out.push_back(stats::friedman_mean_ranks(rows));
  }
  return out;
}

Manifest write_outputs(const ExperimentConfig& config, const std::vector<RunRecord>& records) {
  if (records.empty()) throw InvalidArgument("write_outputs: no records");
  const fs::path& dir = config.out_dir;
  std::error_code ec;
  fs::create_directories(dir / "trajectories", ec);
  if (!ec) fs::create_directories(dir / "plots", ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  std::vector<std::string> files;
  auto emit = [&](const std::string& rel, const std::string& content) {
    write_file(dir / rel, content);
    files.push_back(rel);
  };

  std::string results = "problem,dim,algorithm,run,seed,final_error,fes_used,elapsed_seconds\n";
  for (const auto& r : records) {
    results += r.problem + "," + std::to_string(r.dim) + "," + r.algorithm + "," +
               std::to_string(run_index(config, r)) + "," + std::to_string(r.seed) + "," +
               report::format_exact(r.final_error) + "," + std::to_string(r.fes_used) + "," +
               report::format_exact(r.elapsed_seconds) + "\n";
    emit(trajectory_name(config, r), report::trajectory_csv(r));
  }
  emit("results.csv", results);

  // Instances in record order, records grouped per instance and per algorithm.
  std::vector<std::pair<std::string, std::size_t>> order;
  std::map<std::pair<std::string, std::size_t>, std::vector<RunRecord>> by_instance;
  for (const auto& r : records) {
    auto [it, inserted] = by_instance.try_emplace({r.problem, r.dim});
    if (inserted) order.push_back(it->first);
    it->second.push_back(r);
  }

  std::string summary = "problem,dim,algorithm,min,median,max\n";
  for (const auto& key : order) {
    const auto& recs = by_instance[key];
    for (const auto& a : config.algorithms) {
      std::vector<double> errs;
      for (const auto& r : recs) {
        if (r.algorithm == a) errs.push_back(r.final_error);
      }
      if (errs.empty()) continue;
      const auto s = stats::summary_row(errs);
      summary += key.first + "," + std::to_string(key.second) + "," + a + "," + report::format_sci(s.min) + "," +
                 report::format_sci(s.median) + "," + report::format_sci(s.max) + "\n";
    }
    emit("plots/" + key.first + "_D" + std::to_string(key.second) + ".svg",
         report::emit_convergence_svg(recs, key.first + " (D=" + std::to_string(key.second) + ")"));
  }
  emit("summary.csv", summary);

  if (config.algorithms.size() >= 2) {
    const auto stages = stage_friedman(records, config.algorithms);
    std::string ranks = "stage";
    for (const auto& a : config.algorithms) ranks += "," + a;
    ranks += "\n";
    std::string friedman = "stage,chi_square,df,critical_5pct,reject\n";
    for (std::size_t s = 0; s < kStageCount; ++s) {
      ranks += stage_labels()[s];
      for (double m : stages[s].mean_ranks) ranks += "," + fixed(m, 4);
      ranks += "\n";
      friedman += stage_labels()[s] + "," + fixed(stages[s].chi_square, 4) + "," +
                  std::to_string(stages[s].degrees_of_freedom) + "," +
                  (std::isnan(stages[s].critical_value) ? std::string("nan") : fixed(stages[s].critical_value, 3)) +
                  "," + (stages[s].reject_null ? "1" : "0") + "\n";
    }
    emit("ranks.csv", ranks);
    emit("friedman.csv", friedman);
  }

  const auto targets = stats::precision_targets();
  std::string ecd = "dim,fes";
  for (const auto& a : config.algorithms) ecd += "," + a;
  ecd += "\n";
  for (int dim : config.dims) {
    const auto grid = stats::ecd_grid(config.budget_for(dim));
    std::vector<stats::EcdCurve> curves;
    for (const auto& a : config.algorithms) {
      std::vector<RunRecord> subset;
      for (const auto& r : records) {
        if (r.algorithm == a && static_cast<int>(r.dim) == dim) subset.push_back(r);
      }
      if (subset.empty()) throw InvalidArgument("write_outputs: no runs of '" + a + "'");
      curves.push_back(stats::ecd_curve(subset, targets, grid));
      if (!stats::ecd_is_valid(curves.back())) throw Error("ECD curve of '" + a + "' violates its invariants");
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
      ecd += std::to_string(dim) + "," + fixed(grid[g], 1);
      for (const auto& c : curves) ecd += "," + fixed(c.fraction[g], 6);
      ecd += "\n";
    }
    std::vector<RunRecord> subset;
    for (const auto& r : records) {
      if (static_cast<int>(r.dim) == dim) subset.push_back(r);
    }
    emit("time_boxplot_D" + std::to_string(dim) + ".csv", report::emit_time_boxplot_data(subset));
  }
  emit("ecd.csv", ecd);

  files.push_back("manifest.json");
  std::sort(files.begin(), files.end());

  json m;
  m["version"] = std::string(kVersion);
  m["config"] = json::parse(config_json(config));
  for (int dim : config.dims) m["budgets"][std::to_string(dim)] = config.budget_for(dim);
  for (const auto& a : config.algorithms) {
    for (int dim : config.dims) {
      json p = json::object();
      if (direct::is_direct_algorithm(a)) {
        p["epsilon"] = config.direct_epsilon;
        if (a == "dirmin") p["local_budget_fraction"] = config.local_budget_fraction;
      } else {
        for (const auto& [k, v] : nature::effective_params(a, static_cast<std::size_t>(dim), config.params)) p[k] = v;
      }
      m["effective_params"][a][std::to_string(dim)] = p;
    }
  }
  m["friedman_input"] = "median over runs of the snapped error at each checkpoint, one row per (problem, dim)";
  m["runs"] = json::array();
  for (const auto& r : records) {
    m["runs"].push_back({{"problem", r.problem},
                         {"dim", r.dim},
                         {"algorithm", r.algorithm},
                         {"run", run_index(config, r)},
                         {"seed", r.seed},
                         {"trajectory", trajectory_name(config, r)}});
  }
  m["files"] = files;

  Manifest out;
  out.out_dir = dir;
  out.files = files;
  out.json = m.dump(2) + "\n";
  write_file(dir / "manifest.json", out.json);
  return out;
}

Manifest run_experiment(const ExperimentConfig& config) { return write_outputs(config, execute(config)); }

Manifest report(const fs::path& out_dir) {
  json m;
  try {
    m = json::parse(read_file(out_dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw IoError("manifest.json is malformed: " + std::string(e.what()));
  }
  if (!m.contains("config")) throw IoError("manifest.json has no config");
  ExperimentConfig config = parse_config(m["config"].dump());
  config.out_dir = out_dir;

  std::istringstream is(read_file(out_dir / "results.csv"));
  std::string line;
  std::getline(is, line);
  if (line != "problem,dim,algorithm,run,seed,final_error,fes_used,elapsed_seconds")
    throw IoError("results.csv: unexpected header");
  std::vector<RunRecord> records;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
    if (cols.size() != 8) throw IoError("results.csv: malformed line '" + line + "'");
    RunRecord r;
    try {
      r.problem = cols[0];
      r.dim = std::stoul(cols[1]);
      r.algorithm = cols[2];
      r.seed = std::stoull(cols[4]);
      r.final_error = std::stod(cols[5]);
      r.fes_used = std::stoll(cols[6]);
      r.elapsed_seconds = std::stod(cols[7]);
    } catch (const std::exception&) {
      throw IoError("results.csv: malformed line '" + line + "'");
    }
    r.max_fes = config.budget_for(static_cast<int>(r.dim));
    try {
      r.trajectory = report::parse_trajectory_csv(read_file(out_dir / trajectory_name(config, r)));
    } catch (const InvalidArgument& e) {
      throw IoError(trajectory_name(config, r) + ": " + e.what());
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw IoError("results.csv holds no runs");
  return write_outputs(config, records);
}

namespace {

struct Check {
  std::ostream& out;
  int failures = 0;

  void operator()(const std::string& name, bool ok, const std::string& detail = {}) {
    out << (ok ? "ok   " : "FAIL ") << name;
    if (!ok && !detail.empty()) out << ": " << detail;
    out << '\n';
    if (!ok) ++failures;
  }
};

// Problem whose objective also bumps an external counter.
Problem counted(Problem p, const std::shared_ptr<std::int64_t>& counter) {
  p.objective = [inner = p.objective, counter](std::span<const double> x) {
    ++*counter;
    return inner(x);
  };
  return p;
}

RunRecord run_any(const std::string& algo, const Problem& p, Budget& b, std::uint64_t seed) {
  if (direct::is_direct_algorithm(algo)) return direct::run_direct({direct::parse_variant(algo)}, p, b);
  return nature::run_optimizer(algo, p, b, seed);
}

}  // namespace

int verify(std::ostream& out) {
  Check check{out};
  const std::vector<std::string> algos{"pso", "de", "lshade", "dir", "dir_l", "dir_gl", "dirmin"};

  for (const char* name : {"sphere", "rastrigin"}) {
    for (std::size_t dim : {2, 3}) {
      const Problem p = suites::make_function(name, dim, 7);
      Budget b{1'000'000};
      Tracker t(p, b, false);
      direct::Solver solver({direct::Variant::dir}, t);
      bool ok = true;
      solver.initialize();
      for (int it = 0; it < 60 && ok; ++it) {
        if (!solver.iterate()) break;
        ok = solver.partition().tiles_unit_cube();
      }
      check(std::string("tiling ") + name + " D=" + std::to_string(dim), ok);
    }
  }

  Rng rng(99);
  const auto& cat = suites::catalog();
  bool honest = true;
  std::string detail;
  for (int i = 0; i < 42; ++i) {
    const std::string& algo = algos[static_cast<std::size_t>(i) % algos.size()];
    const auto& base = cat[rng.index(cat.size())];
    const auto counter = std::make_shared<std::int64_t>(0);
    const Problem p = counted(suites::make_function(base.name, 2 + rng.index(4), 1 + rng.index(50)), counter);
    Budget b{static_cast<std::int64_t>(1 + rng.index(400))};
    const RunRecord r = run_any(algo, p, b, 5);
    if (*counter != r.fes_used || r.fes_used > b.max_fes) {
      honest = false;
      detail = algo + " on " + p.name;
    }
  }
  check("budget honesty", honest, detail);

  for (const auto& algo : algos) {
    const Problem p = suites::make_function("rastrigin", 3, 11);
    Budget b1{2000}, b2{2000};
    const auto r1 = run_any(algo, p, b1, 17);
    const auto r2 = run_any(algo, p, b2, 17);
    check("reproducible " + algo, r1.trajectory == r2.trajectory);
  }

  bool ranks_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng.index(6);
    std::vector<std::vector<double>> rows(1 + rng.index(10), std::vector<double>(m));
    for (auto& row : rows) {
      for (auto& v : row) v = static_cast<double>(rng.index(4));
    }
    double sum = 0.0;
    for (double r : stats::friedman_mean_ranks(rows).mean_ranks) sum += r;
    ranks_ok = ranks_ok && std::abs(sum - static_cast<double>(m * (m + 1)) / 2.0) <= 1e-9;
  }
  check("rank-sum conservation", ranks_ok);

  {
    const Problem p = suites::make_function("sphere", 2, 3);
    std::vector<RunRecord> recs;
    for (std::uint64_t s = 0; s < 3; ++s) {
      Budget b{1000};
      recs.push_back(nature::run_optimizer("de", p, b, s));
    }
    const auto curve = stats::ecd_curve(recs, stats::precision_targets(), stats::ecd_grid(1000));
    check("ECD monotone and bounded", stats::ecd_is_valid(curve));
  }

  const auto targets = stats::precision_targets();
  check("precision targets", targets.size() == 51 && targets.front() == 1e2 && targets.back() == 1e-8);

  return check.failures;
}

}  // namespace dfo::experiment
