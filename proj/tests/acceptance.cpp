// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dfo/core.hpp"
#include "dfo/direct.hpp"
#include "dfo/experiment.hpp"
#include "dfo/nature.hpp"
#include "dfo/report.hpp"
#include "dfo/rng.hpp"
#include "dfo/stats.hpp"
#include "dfo/suites.hpp"

using namespace dfo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dfo_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// 1. DIRECT family runs are bit-identical.
Outcome determinism_of_direct() {
  const std::vector<const char*> fns{"sphere", "rastrigin", "rosenbrock", "ackley", "schaffer_f7"};
  int compared = 0;
  for (auto v : {direct::Variant::dir, direct::Variant::dir_l, direct::Variant::dir_gl, direct::Variant::dirmin}) {
    for (std::size_t dim : {2, 5}) {
      for (std::size_t i = 0; i < fns.size(); ++i) {
        const Problem p = suites::make_function(fns[i], dim, 301 + i);
        Budget b1{5000}, b2{5000};
        const auto a = report::trajectory_csv(direct::run_direct({v}, p, b1));
        const auto b = report::trajectory_csv(direct::run_direct({v}, p, b2));
        if (a != b) return {false, std::string(direct::to_string(v)) + " differs on " + p.name};
        ++compared;
      }
    }
  }
  return {true, std::to_string(compared) + " run pairs identical"};
}

// 2. Rect volumes sum to one after every iteration.
Outcome tiling_invariant() {
  std::size_t checks = 0;
  for (const char* fn : {"sphere", "rastrigin"}) {
    for (std::size_t dim : {2, 3, 5}) {
      const Problem p = suites::make_function(fn, dim, 17);
      Budget budget{50'000'000};
      Tracker tracker(p, budget, false);
      direct::Solver solver({direct::Variant::dir}, tracker);
      solver.initialize();
      for (int it = 0; it < 200; ++it) {
        if (!solver.iterate()) return {false, p.name + ": selection ran dry at iteration " + std::to_string(it)};
        if (!solver.partition().tiles_unit_cube())
          return {false, p.name + ": tiling broken after iteration " + std::to_string(it + 1)};
        ++checks;
      }
    }
  }
  return {true, std::to_string(checks) + " iterations checked"};
}

// Brute-force selection oracle over candidate K values (pairwise slopes,
// epsilon cutoffs and a log grid).
bool oracle_selects(std::size_t j, const std::vector<double>& d, const std::vector<double>& f, double f_min,
                    double eps) {
  std::vector<double> ks;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] != d[j]) ks.push_back((f[j] - f[i]) / (d[j] - d[i]));
    ks.push_back((f[i] - f_min + eps * std::abs(f_min)) / d[i]);
  }
  for (int e = -60; e <= 60; ++e) ks.push_back(std::pow(10.0, e / 10.0));
  const double cutoff = f_min - eps * std::abs(f_min);
  for (double k : ks) {
    if (!(k > 0.0)) continue;
    const double lj = f[j] - k * d[j];
    bool ok = lj <= cutoff + 1e-12 * (std::abs(cutoff) + k * d[j] + 1.0);
    for (std::size_t i = 0; i < d.size() && ok; ++i)
      ok = lj <= f[i] - k * d[i] + 1e-12 * (std::abs(f[i]) + std::abs(f[j]) + k * (d[i] + d[j]) + 1.0);
    if (ok) return true;
  }
  return false;
}

// 3. Hull selection equals the brute-force oracle.
Outcome hull_oracle() {
  Rng rng(31337);
  int agree = 0;
  const int total = 200;
  for (int trial = 0; trial < total; ++trial) {
    const std::size_t n = 1 + rng.index(30);
    std::vector<double> d(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Measures of real rects, so equal-d groups occur.
      std::vector<std::uint8_t> depth(3);
      for (auto& t : depth) t = static_cast<std::uint8_t>(rng.index(3));
      d[i] = direct::measure(depth, direct::Variant::dir);
      f[i] = rng.uniform(-2.0, 5.0);
      if (i > 0 && rng.uniform() < 0.15) f[i] = f[rng.index(i)];
    }
    const double f_min = *std::min_element(f.begin(), f.end());
    const double eps = std::array{0.0, 1e-4, 1e-2}[trial % 3];
    std::vector<std::size_t> expected;
    for (std::size_t j = 0; j < n; ++j) {
      if (oracle_selects(j, d, f, f_min, eps)) expected.push_back(j);
    }
    if (direct::potentially_optimal(d, f, f_min, eps) == expected) ++agree;
  }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " partitions agree"};
}

// 4. First DIRECT iteration on the centered quadratic.
Outcome first_iteration_trace() {
  Problem p;
  p.name = "centered_quadratic";
  p.dim = 2;
  p.lower = {0, 0};
  p.upper = {1, 1};
  // The value at the center is 0; a target below it keeps the run going.
  p.f_star = -1.0;
  p.objective = [](std::span<const double> x) { return (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5); };
  Budget budget{100};
  Tracker tracker(p, budget);
  direct::Solver solver({direct::Variant::dir}, tracker);
  solver.initialize();
  solver.iterate();
  const auto& rects = solver.partition().rects;
  std::vector<int> depth_sums;
  for (const auto& r : rects) depth_sums.push_back(r.total_depth());
  std::sort(depth_sums.begin(), depth_sums.end());
  const bool ok = rects.size() == 5 && depth_sums == std::vector<int>{1, 1, 2, 2, 2} && budget.used == 5 &&
                  solver.partition().tiles_unit_cube();
  return {ok, std::to_string(rects.size()) + " rects, " + std::to_string(budget.used) + " evaluations"};
}

// 5. LSHADE solves the easy shifted problems.
Outcome easy_convergence() {
  std::string detail;
  bool ok = true;
  for (const char* fn : {"sphere", "rastrigin"}) {
    Problem p;
    for (auto& q : suites::suite("shifted", 5)) {
      if (q.name.starts_with(std::string(fn) + "_shift_s")) p = q;
    }
    std::vector<double> errs;
    for (std::uint64_t run = 0; run < 15; ++run) {
      Budget b{50000};
      errs.push_back(nature::run_optimizer("lshade", p, b, 1 + run).final_error);
    }
    const auto s = stats::summary_row(errs);
    ok = ok && s.median == 0.0;
    detail += p.name + " median " + fmt("%.3g", s.median) + " ";
  }
  return {ok, detail};
}

// 6. DIRMIN exploits; DIR gets close.
Outcome dirmin_exploitation() {
  Problem p;
  for (auto& q : suites::suite("shifted", 5)) {
    if (q.name.starts_with("sphere_shift_s")) p = q;
  }
  Budget b1{50000}, b2{50000};
  const double e_min = snap_error(direct::run_direct({direct::Variant::dirmin}, p, b1).final_error);
  const double e_dir = snap_error(direct::run_direct({direct::Variant::dir}, p, b2).final_error);
  return {e_min == 0.0 && e_dir <= 1e-2, "dirmin " + fmt("%.3g", e_min) + ", dir " + fmt("%.3g", e_dir)};
}

// 7. DIRECT leads early, LSHADE leads at the end.
Outcome rank_crossover() {
  experiment::ExperimentConfig c;
  c.suite = "shifted_rotated";
  c.dims = {10};
  c.algorithms = {"de", "lshade", "pso", "dir", "dir_gl", "dirmin"};
  c.runs = 10;
  c.maxfes_scale = 0.25;
  c.jobs = jobs();
  const auto records = experiment::execute(c);
  const auto stages = experiment::stage_friedman(records, c.algorithms);
  const auto& first = stages.front().mean_ranks;
  const auto& last = stages.back().mean_ranks;
  const double best_direct = std::min({first[3], first[4], first[5]});
  const bool early = best_direct < first[2] && best_direct < first[0];
  bool late = true;
  for (std::size_t a = 0; a < last.size(); ++a) {
    if (a != 1 && !(last[1] < last[a])) late = false;
  }
  std::string detail = "first:";
  for (double r : first) detail += " " + fmt("%.2f", r);
  detail += " final:";
  for (double r : last) detail += " " + fmt("%.2f", r);
  return {early && late, detail + " (de lshade pso dir dir_gl dirmin)"};
}

// 8. Stats properties.
Outcome stats_suite() {
  Rng rng(8);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t m = 2 + rng.index(9);
    std::vector<std::vector<double>> rows(1 + rng.index(15), std::vector<double>(m));
    for (auto& row : rows) {
      for (auto& v : row) v = static_cast<double>(rng.index(4));
    }
    const auto r = stats::friedman_mean_ranks(rows);
    const double sum = std::accumulate(r.mean_ranks.begin(), r.mean_ranks.end(), 0.0);
    if (std::abs(sum - static_cast<double>(m * (m + 1)) / 2.0) > 1e-9) return {false, "rank sum off"};
  }

  // Every ECD curve of a small experiment, as written to ecd.csv.
  experiment::ExperimentConfig c;
  c.suite = "multimodal_hard";
  c.dims = {2, 5};
  c.algorithms = {"pso", "de", "lshade", "dir", "dir_l", "dir_gl", "dirmin"};
  c.runs = 3;
  c.maxfes_scale = 0.05;
  c.jobs = jobs();
  c.out_dir = scratch("ecd");
  experiment::run_experiment(c);
  std::istringstream is(slurp(c.out_dir / "ecd.csv"));
  std::string line;
  std::getline(is, line);
  std::vector<double> prev;
  std::string prev_dim;
  std::size_t points = 0;
  while (std::getline(is, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string col; std::getline(ls, col, ',');) cols.push_back(col);
    if (cols[0] != prev_dim) prev.assign(cols.size() - 2, 0.0);
    prev_dim = cols[0];
    for (std::size_t a = 2; a < cols.size(); ++a) {
      const double v = std::stod(cols[a]);
      if (v < 0.0 || v > 1.0 || v < prev[a - 2]) return {false, "ECD violation: " + line};
      prev[a - 2] = v;
    }
    ++points;
  }
  if (points != 2 * 101) return {false, "unexpected ECD size"};

  const auto t = stats::precision_targets();
  if (!(t.size() == 51 && t.front() == 1e2 && t.back() == 1e-8)) return {false, "precision targets"};
  return {true, "1000 rank matrices, 14 ECD curves, 51 targets"};
}

// 9. Evaluations seen by the objective match the recorded count.
Outcome budget_honesty() {
  Rng rng(9);
  const std::vector<std::string> algos{"pso", "de", "lshade", "dir", "dir_l", "dir_gl", "dirmin"};
  const auto& cat = suites::catalog();
  for (int i = 0; i < 500; ++i) {
    const std::string& algo = algos[rng.index(algos.size())];
    const auto& base = cat[rng.index(cat.size())];
    const std::size_t dim = 2 + rng.index(5);
    auto calls = std::make_shared<std::int64_t>(0);
    Problem p = suites::make_function(base.name, dim, 1 + rng.index(1000));
    p.objective = [inner = p.objective, calls](std::span<const double> x) {
      ++*calls;
      return inner(x);
    };
    Budget b{static_cast<std::int64_t>(1 + rng.index(600))};
    const RunRecord r = direct::is_direct_algorithm(algo)
                            ? direct::run_direct({direct::parse_variant(algo)}, p, b)
                            : nature::run_optimizer(algo, p, b, rng.next());
    if (*calls != r.fes_used || r.fes_used > b.max_fes || b.used != r.fes_used)
      return {false, algo + " on " + p.name + ": " + std::to_string(*calls) + " calls, " +
                         std::to_string(r.fes_used) + " recorded, budget " + std::to_string(b.max_fes)};
  }
  return {true, "500 runs"};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DFOBENCH_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 10. Two separate invocations produce identical trajectories.
Outcome seeded_reproducibility() {
  const fs::path dir = scratch("repro");
  for (const char* out : {"a", "b"}) {
    std::ofstream(dir / (std::string(out) + ".json"))
        << R"({"suite":"shifted_rotated","dims":[5],"algorithms":["pso","de","lshade"],"runs":3,)"
        << R"("base_seed":4242,"maxfes_scale":0.1,"out_dir":")" << (dir / out).generic_string() << "\"}";
    if (run_cli("run " + (dir / (std::string(out) + ".json")).string()) != 0) return {false, "dfobench run failed"};
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "a" / "trajectories")) {
    const auto other = dir / "b" / "trajectories" / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other))
      return {false, e.path().filename().string() + " differs"};
    ++files;
  }
  return {files == 14 * 3 * 3, std::to_string(files) + " trajectory files identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"DIRECT determinism", determinism_of_direct},
      {"tiling invariant", tiling_invariant},
      {"hull oracle equivalence", hull_oracle},
      {"first-iteration DIRECT trace", first_iteration_trace},
      {"LSHADE easy-problem convergence", easy_convergence},
      {"DIRMIN exploitation", dirmin_exploitation},
      {"early/late rank crossover", rank_crossover},
      {"stats unit suite", stats_suite},
      {"budget honesty fuzz", budget_honesty},
      {"seeded reproducibility", seeded_reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu: %s (%s) [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
