#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfo/core.hpp"
#include "dfo/stats.hpp"

namespace dfo::report {

/// Errors at or below this are drawn on the floor of the log axis.
inline constexpr double kPlotFloor = 1e-8;

/// DIRECT variants are deterministic and drawn as a single line.
bool is_deterministic(std::string_view algorithm);

/// Pointwise statistics of snapped errors over the runs of one algorithm.
struct ConvergenceSeries {
  std::string algorithm;
  bool deterministic = false;
  std::vector<double> grid;
  std::vector<double> median;
  std::vector<double> best;
  std::vector<double> worst;
};

/// One series per algorithm, in order of first appearance.
std::vector<ConvergenceSeries> convergence_series(std::span<const RunRecord> records,
                                                  std::span<const double> grid);

/// Self-contained log-log SVG: solid median and dashed best/worst lines per
/// stochastic algorithm, one solid line per deterministic one. Throws
/// InvalidArgument on empty input.
std::string emit_convergence_svg(std::span<const RunRecord> records, std::string_view title = {});

/// CSV "algorithm,min,q1,median,q3,max" of elapsed seconds per algorithm.
std::string emit_time_boxplot_data(std::span<const RunRecord> records);

/// %.17g, round-trippable.
std::string format_exact(double v);
/// %.6e, for tables.
std::string format_sci(double v);

std::string trajectory_csv(const RunRecord& record);
/// Parses the output of trajectory_csv.
std::vector<TrajectoryPoint> parse_trajectory_csv(std::string_view text);

}  // namespace dfo::report
