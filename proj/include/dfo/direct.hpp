#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dfo/core.hpp"

namespace dfo::direct {

enum class Variant { dir, dir_l, dir_gl, dirmin };

std::string_view to_string(Variant v);
/// Accepts "dir", "dir_l", "dir_gl", "dirmin".
Variant parse_variant(std::string_view name);
bool is_direct_algorithm(std::string_view name);

/// Trisection depth limit per coordinate. Cell indices up to 3^36 fit in
/// 64 bits, and double centers stop resolving new points well before.
inline constexpr int kMaxDepth = 36;

struct DirectConfig {
  Variant variant = Variant::dir;
  double epsilon = 1e-4;
  double local_budget_fraction = 0.05;  // dirmin only

  void validate() const;
};

// Center identity in exact ternary form: per coordinate the pair (depth,
// cell) reduced to the coarsest depth that represents the same point.
using CenterKey = std::vector<std::uint64_t>;

struct CenterKeyHash {
  std::size_t operator()(const CenterKey& key) const noexcept;
};

// A hyperrectangle of the partition. Along coordinate k the side length is
// 3^-depth[k] and the rect occupies [cell[k], cell[k] + 1] * 3^-depth[k].
struct Rect {
  std::vector<std::uint8_t> depth;
  std::vector<std::uint64_t> cell;
  std::vector<double> center;
  double f = 0.0;
  double d = 0.0;

  int min_depth() const;
  int total_depth() const;
  bool splittable() const { return min_depth() < kMaxDepth; }
  CenterKey key() const;
};

CenterKey center_key(std::span<const std::uint8_t> depth, std::span<const std::uint64_t> cell);

/// Half-diagonal (dir, dir_gl, dirmin) or half the longest side (dir_l).
double measure(std::span<const std::uint8_t> depths, Variant variant);

/// lower + x_unit .* (upper - lower), clamped into the box.
std::vector<double> normalize(const Problem& problem, std::span<const double> x_unit);

struct Partition {
  Partition(std::size_t dim, Variant variant);

  std::size_t dim;
  Variant variant;
  std::vector<Rect> rects;
  double f_min = std::numeric_limits<double>::infinity();
  std::vector<double> x_min;  // unit coordinates
  std::unordered_map<CenterKey, double, CenterKeyHash> cache;

  /// Records an evaluated point, updating f_min / x_min.
  void observe(std::span<const double> x_unit, double f);
  /// True iff the rect volumes sum to exactly 1 (checked in integer
  /// arithmetic over powers of 3).
  bool tiles_unit_cube() const;
  double max_measure() const;
};

/// Evaluates a point of the unit cube; may throw StopSearch.
using UnitObjective = std::function<double(std::span<const double>)>;

/// Indices (ascending) of rects that admit some K > 0 with
///   f_j - K d_j <= f_i - K d_i for all i, and
///   f_j - K d_j <= f_min - epsilon |f_min|.
/// Points are (d[i], f[i]); with one_per_group only the first minimal-f rect
/// of each distinct d enters. Throws InvalidArgument on empty input.
std::vector<std::size_t> potentially_optimal(std::span<const double> d, std::span<const double> f,
                                             double f_min, double epsilon, bool one_per_group = false);

/// Potentially optimal rects of the partition (dir_l: one per measure group).
/// Rects at the depth limit are not candidates.
std::vector<std::size_t> potentially_optimal(const Partition& partition, double epsilon);

/// Two-step selection: rects nondominated in (f, -d), united with rects
/// nondominated in (distance to x_min, -d).
std::vector<std::size_t> gl_select(const Partition& partition);

/// Trisects rect `index` along all of its longest sides, ordering the splits
/// by w_k = min(f(c + delta e_k), f(c - delta e_k)). Returns the indices of
/// the modified and created rects. If `objective` throws StopSearch while
/// sampling, dimensions with both samples evaluated are still split and the
/// exception is rethrown.
std::vector<std::size_t> split(Partition& partition, std::size_t index, const UnitObjective& objective);

/// Shrinking-step coordinate descent in the unit cube (initial step 1/6,
/// halved after an unsuccessful sweep, stops below 1E-9 or after
/// local_budget evaluations). Never returns a value worse than f_start.
std::pair<std::vector<double>, double> dirmin_refine(std::span<const double> start_unit, double f_start,
                                                     const UnitObjective& objective,
                                                     std::int64_t local_budget);

struct IterationInfo {
  std::size_t iteration = 0;
  std::size_t rects = 0;
  double f_min = 0.0;
  double max_d = 0.0;
  std::int64_t fes = 0;
};

class Solver {
public:
  Solver(const DirectConfig& config, Tracker& tracker);

  /// Evaluates the center of the unit cube.
  void initialize();
  /// One selection + split round. Returns false if nothing can be selected.
  bool iterate();

  const Partition& partition() const { return partition_; }
  std::size_t iteration() const { return iteration_; }
  std::int64_t local_evaluations() const { return local_evaluations_; }
  IterationInfo info() const;

private:
  double evaluate_unit(std::span<const double> x_unit);

  DirectConfig config_;
  Tracker& tracker_;
  Partition partition_;
  UnitObjective objective_;
  std::unordered_set<CenterKey, CenterKeyHash> refined_;
  std::size_t iteration_ = 0;
  std::int64_t local_evaluations_ = 0;
};

/// Deterministic run until the budget is spent or the snapped error is zero.
/// When `trace` is set one CSV line per iteration is written to it
/// (iteration,rects,f_min,max_d).
RunRecord run_direct(const DirectConfig& config, const Problem& problem, Budget& budget,
                     std::ostream* trace = nullptr);

/// Trace CSV header matching the lines written by run_direct.
std::string_view trace_header();

}  // namespace dfo::direct
