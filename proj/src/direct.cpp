#include "dfo/direct.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

namespace dfo::direct {

namespace {

// 3^-t for t in [0, kMaxDepth + 1].
const std::array<double, kMaxDepth + 2>& inv_pow3() {
  static const auto table = [] {
    std::array<double, kMaxDepth + 2> t{};
    double v = 1.0;
    for (auto& e : t) {
      e = v;
      v /= 3.0;
    }
    return t;
  }();
  return table;
}

double cell_center(std::uint64_t cell, int depth) {
  return (static_cast<double>(cell) + 0.5) * inv_pow3()[static_cast<std::size_t>(depth)];
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::dir: return "dir";
    case Variant::dir_l: return "dir_l";
    case Variant::dir_gl: return "dir_gl";
    case Variant::dirmin: return "dirmin";
  }
  return "dir";
}

Variant parse_variant(std::string_view name) {
  if (name == "dir") return Variant::dir;
  if (name == "dir_l") return Variant::dir_l;
  if (name == "dir_gl") return Variant::dir_gl;
  if (name == "dirmin") return Variant::dirmin;
  throw InvalidArgument("unknown DIRECT variant '" + std::string(name) + "'");
}

bool is_direct_algorithm(std::string_view name) {
  return name == "dir" || name == "dir_l" || name == "dir_gl" || name == "dirmin";
}

void DirectConfig::validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("direct: epsilon must be positive");
  if (!(local_budget_fraction > 0.0 && local_budget_fraction <= 1.0))
    throw InvalidArgument("direct: local_budget_fraction must lie in (0, 1]");
}

std::size_t CenterKeyHash::operator()(const CenterKey& key) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t v : key) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h);
}

int Rect::min_depth() const {
  return *std::min_element(depth.begin(), depth.end());
}

int Rect::total_depth() const {
  return std::accumulate(depth.begin(), depth.end(), 0);
}

CenterKey Rect::key() const { return center_key(depth, cell); }

CenterKey center_key(std::span<const std::uint8_t> depth, std::span<const std::uint64_t> cell) {
  CenterKey key;
  key.reserve(2 * depth.size());
  for (std::size_t k = 0; k < depth.size(); ++k) {
    // The center of cell m at depth t is (2m + 1) / (2 * 3^t); strip common
    // factors of 3 so equal points get equal keys.
    std::uint64_t t = depth[k];
    std::uint64_t num = 2 * cell[k] + 1;
    while (t > 0 && num % 3 == 0) {
      num /= 3;
      --t;
    }
    key.push_back(t);
    key.push_back(num);
  }
  return key;
}

double measure(std::span<const std::uint8_t> depths, Variant variant) {
  if (depths.empty()) return 0.0;
  if (variant == Variant::dir_l) {
    const int t = *std::min_element(depths.begin(), depths.end());
    return 0.5 * inv_pow3()[static_cast<std::size_t>(t)];
  }
  // Summed by depth level so that equal depth multisets give equal doubles.
  std::array<std::size_t, kMaxDepth + 2> counts{};
  for (auto t : depths) ++counts[t];
  double s = 0.0;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (counts[t] == 0) continue;
    const double side = inv_pow3()[t];
    s += static_cast<double>(counts[t]) * side * side;
  }
  return 0.5 * std::sqrt(s);
}

std::vector<double> normalize(const Problem& problem, std::span<const double> x_unit) {
  std::vector<double> x(problem.dim);
  for (std::size_t k = 0; k < problem.dim; ++k) {
    const double v = problem.lower[k] + x_unit[k] * (problem.upper[k] - problem.lower[k]);
    x[k] = std::clamp(v, problem.lower[k], problem.upper[k]);
  }
  return x;
}

Partition::Partition(std::size_t dim_, Variant variant_) : dim(dim_), variant(variant_) {}

void Partition::observe(std::span<const double> x_unit, double f) {
  if (f < f_min || x_min.empty()) {
    if (f < f_min) f_min = f;
    x_min.assign(x_unit.begin(), x_unit.end());
  }
}

bool Partition::tiles_unit_cube() const {
  if (rects.empty()) return false;
  std::map<int, std::uint64_t> by_level;
  for (const auto& r : rects) ++by_level[r.total_depth()];
  // Sum of count_s * 3^-s must be exactly 1: carry base-3 from the finest level.
  int level = by_level.rbegin()->first;
  std::uint64_t carry = 0;
  for (; level > 0; --level) {
    auto it = by_level.find(level);
    const std::uint64_t c = carry + (it == by_level.end() ? 0 : it->second);
    if (c % 3 != 0) return false;
    carry = c / 3;
  }
  auto it = by_level.find(0);
  return carry + (it == by_level.end() ? 0 : it->second) == 1;
}

double Partition::max_measure() const {
  double m = 0.0;
  for (const auto& r : rects) m = std::max(m, r.d);
  return m;
}

// ---- Selection ------------------------------------------------------------

namespace {

struct Group {
  double d;
  double f;
  std::vector<std::size_t> members;
};

// Slope of the segment from group a to group b (d_b > d_a).
double slope(const Group& a, const Group& b) { return (b.f - a.f) / (b.d - a.d); }

}  // namespace

std::vector<std::size_t> potentially_optimal(std::span<const double> d, std::span<const double> f,
                                             double f_min, double epsilon, bool one_per_group) {
  const std::size_t m = d.size();
  if (m == 0 || f.size() != m) throw InvalidArgument("potentially_optimal: empty partition");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (d[a] != d[b]) return d[a] < d[b];
    if (f[a] != f[b]) return f[a] < f[b];
    return a < b;
  });

  std::vector<Group> groups;
  for (std::size_t pos = 0; pos < m;) {
    const std::size_t first = order[pos];
    Group g{d[first], f[first], {first}};
    std::size_t next = pos + 1;
    while (next < m && d[order[next]] == g.d) {
      if (!one_per_group && f[order[next]] == g.f) g.members.push_back(order[next]);
      ++next;
    }
    groups.push_back(std::move(g));
    pos = next;
  }

  // Start at the minimal f; among equal minima the largest d.
  std::size_t start = 0;
  for (std::size_t g = 1; g < groups.size(); ++g) {
    if (groups[g].f <= groups[start].f) start = g;
  }

  std::vector<std::size_t> hull;
  for (std::size_t g = start; g < groups.size(); ++g) {
    while (hull.size() >= 2 &&
           slope(groups[hull[hull.size() - 2]], groups[hull.back()]) > slope(groups[hull.back()], groups[g]))
      hull.pop_back();
    hull.push_back(g);
  }

  const double threshold = f_min - epsilon * std::abs(f_min);
  std::vector<std::size_t> selected;
  for (std::size_t h = 0; h < hull.size(); ++h) {
    const Group& g = groups[hull[h]];
    bool keep = true;
    if (h + 1 < hull.size()) {
      const double k_high = slope(g, groups[hull[h + 1]]);
      keep = g.f - k_high * g.d <= threshold;
    }
    if (keep) selected.insert(selected.end(), g.members.begin(), g.members.end());
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::vector<std::size_t> potentially_optimal(const Partition& partition, double epsilon) {
  std::vector<std::size_t> index;
  std::vector<double> d, f;
  for (std::size_t i = 0; i < partition.rects.size(); ++i) {
    const Rect& r = partition.rects[i];
    if (!r.splittable()) continue;
    index.push_back(i);
    d.push_back(r.d);
    f.push_back(r.f);
  }
  if (index.empty()) return {};
  auto local = potentially_optimal(d, f, partition.f_min, epsilon, partition.variant == Variant::dir_l);
  for (auto& i : local) i = index[i];
  return local;
}

namespace {

// Rects nondominated when minimizing `value` and maximizing d.
std::vector<std::size_t> nondominated(std::span<const std::size_t> index, std::span<const double> d,
                                      std::span<const double> value) {
  std::vector<std::size_t> order(index.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (d[a] != d[b]) return d[a] > d[b];
    if (value[a] != value[b]) return value[a] < value[b];
    return a < b;
  });
  std::vector<std::size_t> out;
  double best_larger = std::numeric_limits<double>::infinity();
  for (std::size_t pos = 0; pos < order.size();) {
    const double gd = d[order[pos]];
    const double gmin = value[order[pos]];
    std::size_t next = pos;
    while (next < order.size() && d[order[next]] == gd) {
      if (gmin < best_larger && value[order[next]] == gmin) out.push_back(index[order[next]]);
      ++next;
    }
    best_larger = std::min(best_larger, gmin);
    pos = next;
  }
  return out;
}

}  // namespace

std::vector<std::size_t> gl_select(const Partition& partition) {
  if (partition.rects.empty()) throw InvalidArgument("gl_select: empty partition");
  std::vector<std::size_t> index;
  std::vector<double> d, f, dist;
  for (std::size_t i = 0; i < partition.rects.size(); ++i) {
    const Rect& r = partition.rects[i];
    if (!r.splittable()) continue;
    index.push_back(i);
    d.push_back(r.d);
    f.push_back(r.f);
    double s = 0.0;
    for (std::size_t k = 0; k < partition.dim; ++k) {
      const double diff = r.center[k] - partition.x_min[k];
      s += diff * diff;
    }
    dist.push_back(std::sqrt(s));
  }
  auto global = nondominated(index, d, f);
  auto local = nondominated(index, d, dist);
  std::vector<std::size_t> out;
  std::sort(global.begin(), global.end());
  std::sort(local.begin(), local.end());
  std::set_union(global.begin(), global.end(), local.begin(), local.end(), std::back_inserter(out));
  return out;
}

// ---- Splitting ------------------------------------------------------------

namespace {

struct Sample {
  std::size_t k;
  double f_minus;
  double f_plus;
  double w() const { return std::min(f_minus, f_plus); }
};

double sample_child(Partition& part, const Rect& base, std::size_t k, std::uint64_t child_cell,
                    const UnitObjective& objective) {
  std::vector<std::uint8_t> depth = base.depth;
  std::vector<std::uint64_t> cell = base.cell;
  ++depth[k];
  cell[k] = child_cell;
  CenterKey key = center_key(depth, cell);
  if (auto it = part.cache.find(key); it != part.cache.end()) return it->second;
  std::vector<double> x = base.center;
  x[k] = cell_center(child_cell, depth[k]);
  const double f = objective(x);
  part.cache.emplace(std::move(key), f);
  part.observe(x, f);
  return f;
}

}  // namespace

std::vector<std::size_t> split(Partition& partition, std::size_t index, const UnitObjective& objective) {
  if (index >= partition.rects.size()) throw InvalidArgument("split: rect index out of range");
  const Rect base = partition.rects[index];
  const int t = base.min_depth();
  if (t >= kMaxDepth) throw InvalidArgument("split: rect at the depth limit");

  std::vector<Sample> samples;
  std::exception_ptr stopped;
  for (std::size_t k = 0; k < partition.dim; ++k) {
    if (base.depth[k] != t) continue;
    try {
      const std::uint64_t m = base.cell[k];
      const double f_minus = sample_child(partition, base, k, 3 * m, objective);
      const double f_plus = sample_child(partition, base, k, 3 * m + 2, objective);
      samples.push_back({k, f_minus, f_plus});
    } catch (const StopSearch&) {
      stopped = std::current_exception();
      break;
    }
  }

  std::stable_sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    if (a.w() != b.w()) return a.w() < b.w();
    return a.k < b.k;
  });

  std::vector<std::size_t> touched{index};
  Rect current = base;
  for (const Sample& s : samples) {
    const std::size_t k = s.k;
    const std::uint64_t m = current.cell[k];
    const std::uint8_t child_depth = static_cast<std::uint8_t>(current.depth[k] + 1);
    for (int side = 0; side < 2; ++side) {
      Rect child = current;
      child.depth[k] = child_depth;
      child.cell[k] = side == 0 ? 3 * m : 3 * m + 2;
      child.center[k] = cell_center(child.cell[k], child_depth);
      child.f = side == 0 ? s.f_minus : s.f_plus;
      child.d = measure(child.depth, partition.variant);
      touched.push_back(partition.rects.size());
      partition.rects.push_back(std::move(child));
    }
    current.depth[k] = child_depth;
    current.cell[k] = 3 * m + 1;
  }
  current.d = measure(current.depth, partition.variant);
  partition.rects[index] = std::move(current);

  if (stopped) std::rethrow_exception(stopped);
  return touched;
}

std::pair<std::vector<double>, double> dirmin_refine(std::span<const double> start_unit, double f_start,
                                                     const UnitObjective& objective,
                                                     std::int64_t local_budget) {
  std::vector<double> x(start_unit.begin(), start_unit.end());
  double fx = f_start;
  double step = 1.0 / 6.0;
  std::int64_t used = 0;
  std::vector<double> y;
  while (step >= 1e-9 && used < local_budget) {
    bool improved = false;
    for (std::size_t k = 0; k < x.size() && used < local_budget; ++k) {
      for (double dir : {1.0, -1.0}) {
        if (used >= local_budget) break;
        const double moved = std::clamp(x[k] + dir * step, 0.0, 1.0);
        if (moved == x[k]) continue;
        y = x;
        y[k] = moved;
        const double fy = objective(y);
        ++used;
        if (fy < fx) {
          x = y;
          fx = fy;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {std::move(x), fx};
}

// ---- Solver ---------------------------------------------------------------

Solver::Solver(const DirectConfig& config, Tracker& tracker)
    : config_(config), tracker_(tracker), partition_(tracker.problem().dim, config.variant) {
  config_.validate();
  objective_ = [this](std::span<const double> x) { return evaluate_unit(x); };
}

double Solver::evaluate_unit(std::span<const double> x_unit) {
  return tracker_(normalize(tracker_.problem(), x_unit));
}

void Solver::initialize() {
  if (!partition_.rects.empty()) return;
  const std::size_t n = partition_.dim;
  Rect root;
  root.depth.assign(n, 0);
  root.cell.assign(n, 0);
  root.center.assign(n, 0.5);
  root.d = measure(root.depth, config_.variant);
  CenterKey key = root.key();
  root.f = objective_(root.center);
  partition_.cache.emplace(std::move(key), root.f);
  partition_.observe(root.center, root.f);
  partition_.rects.push_back(std::move(root));
}

bool Solver::iterate() {
  if (partition_.rects.empty()) initialize();
  const auto selected = config_.variant == Variant::dir_gl ? gl_select(partition_)
                                                           : potentially_optimal(partition_, config_.epsilon);
  if (selected.empty()) return false;
  ++iteration_;
  for (std::size_t idx : selected) split(partition_, idx, objective_);

  if (config_.variant == Variant::dirmin) {
    const auto n = static_cast<std::int64_t>(partition_.dim);
    const auto fraction_budget = static_cast<std::int64_t>(
        std::floor(config_.local_budget_fraction * static_cast<double>(tracker_.budget().max_fes)));
    const std::int64_t local_budget = std::max(2 * n + 2, fraction_budget);
    UnitObjective counted = [this](std::span<const double> x) {
      const double f = evaluate_unit(x);
      ++local_evaluations_;
      return f;
    };
    for (std::size_t idx : selected) {
      if (!refined_.insert(partition_.rects[idx].key()).second) continue;
      const std::vector<double> start = partition_.rects[idx].center;
      auto [x, fx] = dirmin_refine(start, partition_.rects[idx].f, counted, local_budget);
      partition_.observe(x, fx);
    }
  }
  return true;
}

IterationInfo Solver::info() const {
  return {iteration_, partition_.rects.size(), partition_.f_min, partition_.max_measure(),
          tracker_.budget().used};
}

std::string_view trace_header() { return "iteration,rects,f_min,max_d"; }

RunRecord run_direct(const DirectConfig& config, const Problem& problem, Budget& budget, std::ostream* trace) {
  problem.validate();
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  Tracker tracker(problem, budget);
  Solver solver(config, tracker);
  if (trace) *trace << trace_header() << '\n';
  try {
    solver.initialize();
    while (!tracker.finished()) {
      if (!solver.iterate()) break;
      if (trace) {
        const auto info = solver.info();
        char buf[128];
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", info.iteration, info.rects, info.f_min,
                      info.max_d);
        *trace << buf;
      }
    }
  } catch (const StopSearch&) {
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RunRecord rec = tracker.finish(std::string(to_string(config.variant)), 0, elapsed);
  rec.params = {{"epsilon", config.epsilon}};
  if (config.variant == Variant::dirmin) rec.params.emplace_back("local_budget_fraction", config.local_budget_fraction);
  return rec;
}

}  // namespace dfo::direct
