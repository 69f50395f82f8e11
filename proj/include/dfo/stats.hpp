#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dfo/core.hpp"

namespace dfo::stats {

struct Summary {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

/// Snaps each raw error, then min / median / max. Throws InvalidArgument on
/// an empty list.
Summary summary_row(std::span<const double> run_errors);

/// Median with the average-of-middle-two convention. Input need not be sorted.
double median(std::vector<double> values);

/// Quantile with linear interpolation between order statistics
/// (position q * (n - 1)).
double quantile(std::vector<double> values, double q);

struct FriedmanResult {
  std::vector<double> mean_ranks;
  double chi_square = 0.0;
  int degrees_of_freedom = 0;
  // 5% critical value of chi-square with m - 1 dof; NaN when m > 12.
  double critical_value = 0.0;
  bool reject_null = false;
};

/// Rows are problems, columns algorithms. Ranks ascend with the error, ties
/// share the average rank. Throws InvalidArgument on ragged or too small input.
FriedmanResult friedman_mean_ranks(const std::vector<std::vector<double>>& stage_errors);

/// 5% upper critical value of chi-square for 1 <= dof <= 11.
double chi_square_critical_5pct(int dof);

/// 10^2, 10^1.8, ..., 10^-8 (51 values).
std::vector<double> precision_targets();

/// `count` log-spaced evaluation counts from 10 to max_fes.
std::vector<double> ecd_grid(std::int64_t max_fes, std::size_t count = 101);

struct EcdCurve {
  std::vector<double> grid;
  std::vector<double> fraction;
};

/// First evaluation count at which the snapped best error is <= target;
/// +inf if never.
double hit_time(const RunRecord& record, double target);

/// Fraction of (run, target) pairs hit by each grid point. Throws
/// InvalidArgument on empty trajectories or targets.
EcdCurve ecd_curve(std::span<const RunRecord> trajectories, std::span<const double> targets,
                   std::span<const double> grid);

/// Checks the curve invariants: fraction in [0, 1] and non-decreasing.
bool ecd_is_valid(const EcdCurve& curve);

}  // namespace dfo::stats
