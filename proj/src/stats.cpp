#include "dfo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dfo::stats {

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty list");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Summary summary_row(std::span<const double> run_errors) {
  if (run_errors.empty()) throw InvalidArgument("summary_row: no runs");
  std::vector<double> snapped;
  snapped.reserve(run_errors.size());
  for (double e : run_errors) snapped.push_back(snap_error(e));
  const auto [lo, hi] = std::minmax_element(snapped.begin(), snapped.end());
  return {*lo, median(snapped), *hi};
}

double chi_square_critical_5pct(int dof) {
  static constexpr double table[] = {3.841, 5.991, 7.815, 9.488, 11.070, 12.592,
                                     14.067, 15.507, 16.919, 18.307, 19.675};
  if (dof < 1 || dof > 11) return std::numeric_limits<double>::quiet_NaN();
  return table[dof - 1];
}

FriedmanResult friedman_mean_ranks(const std::vector<std::vector<double>>& stage_errors) {
  if (stage_errors.empty()) throw InvalidArgument("friedman: no problems");
  const std::size_t m = stage_errors.front().size();
  if (m < 2) throw InvalidArgument("friedman: need at least two algorithms");
  for (const auto& row : stage_errors) {
    if (row.size() != m) throw InvalidArgument("friedman: shape mismatch");
  }
  const auto p = static_cast<double>(stage_errors.size());
  const auto md = static_cast<double>(m);

  std::vector<double> rank_sums(m, 0.0);
  double sum_sq_ranks = 0.0;
  std::vector<std::size_t> order(m);
  std::vector<double> ranks(m);
  for (const auto& row : stage_errors) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    for (std::size_t pos = 0; pos < m;) {
      std::size_t end = pos + 1;
      while (end < m && row[order[end]] == row[order[pos]]) ++end;
      // Positions pos..end-1 share ranks pos+1..end.
      const double avg = 0.5 * static_cast<double>(pos + 1 + end);
      for (std::size_t q = pos; q < end; ++q) ranks[order[q]] = avg;
      pos = end;
    }
    for (std::size_t a = 0; a < m; ++a) {
      rank_sums[a] += ranks[a];
      sum_sq_ranks += ranks[a] * ranks[a];
    }
  }

  FriedmanResult res;
  res.mean_ranks.resize(m);
  for (std::size_t a = 0; a < m; ++a) res.mean_ranks[a] = rank_sums[a] / p;

  // Tie-corrected statistic; reduces to 12P/(m(m+1)) sum (R_a - (m+1)/2)^2
  // without ties.
  double numer = 0.0;
  for (double r : rank_sums) {
    const double dev = r - p * (md + 1.0) / 2.0;
    numer += dev * dev;
  }
  const double denom = sum_sq_ranks - p * md * (md + 1.0) * (md + 1.0) / 4.0;
  res.chi_square = denom > 0.0 ? (md - 1.0) * numer / denom : 0.0;
  res.degrees_of_freedom = static_cast<int>(m) - 1;
  res.critical_value = chi_square_critical_5pct(res.degrees_of_freedom);
  res.reject_null = !std::isnan(res.critical_value) && res.chi_square > res.critical_value;
  return res;
}

std::vector<double> precision_targets() {
  std::vector<double> out;
  out.reserve(51);
  for (int i = 0; i <= 50; ++i) out.push_back(std::pow(10.0, static_cast<double>(10 - i) / 5.0));
  return out;
}

std::vector<double> ecd_grid(std::int64_t max_fes, std::size_t count) {
  if (max_fes < 10 || count < 2) throw InvalidArgument("ecd_grid: need max_fes >= 10 and count >= 2");
  const double lo = 1.0;
  const double hi = std::log10(static_cast<double>(max_fes));
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  grid.back() = static_cast<double>(max_fes);
  return grid;
}

double hit_time(const RunRecord& record, double target) {
  for (const auto& pt : record.trajectory) {
    if (snap_error(pt.best_error) <= target) return static_cast<double>(pt.fes);
  }
  return std::numeric_limits<double>::infinity();
}

EcdCurve ecd_curve(std::span<const RunRecord> trajectories, std::span<const double> targets,
                   std::span<const double> grid) {
  if (trajectories.empty() || targets.empty()) throw InvalidArgument("ecd_curve: empty input");
  std::vector<double> hits;
  hits.reserve(trajectories.size() * targets.size());
  for (const auto& rec : trajectories) {
    for (double t : targets) hits.push_back(hit_time(rec, t));
  }
  std::sort(hits.begin(), hits.end());
  EcdCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.fraction.reserve(grid.size());
  const auto total = static_cast<double>(hits.size());
  for (double g : grid) {
    const auto reached = std::upper_bound(hits.begin(), hits.end(), g) - hits.begin();
    curve.fraction.push_back(static_cast<double>(reached) / total);
  }
  return curve;
}

bool ecd_is_valid(const EcdCurve& curve) {
  if (curve.grid.size() != curve.fraction.size()) return false;
  for (std::size_t i = 0; i < curve.fraction.size(); ++i) {
    const double v = curve.fraction[i];
    if (!(v >= 0.0 && v <= 1.0)) return false;
    if (i > 0 && v < curve.fraction[i - 1]) return false;
  }
  return true;
}

}  // namespace dfo::stats
