#include "dfo/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "dfo/direct.hpp"

namespace dfo::report {

bool is_deterministic(std::string_view algorithm) { return direct::is_direct_algorithm(algorithm); }

std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::vector<ConvergenceSeries> convergence_series(std::span<const RunRecord> records,
                                                  std::span<const double> grid) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    auto [it, inserted] = groups.try_emplace(r.algorithm);
    if (inserted) order.push_back(r.algorithm);
    it->second.push_back(&r);
  }

  std::vector<ConvergenceSeries> out;
  for (const auto& algo : order) {
    const auto& runs = groups[algo];
    ConvergenceSeries s;
    s.algorithm = algo;
    s.deterministic = is_deterministic(algo);
    s.grid.assign(grid.begin(), grid.end());
    std::vector<double> values(runs.size());
    for (double g : grid) {
      const auto fes = static_cast<std::int64_t>(std::floor(g));
      for (std::size_t i = 0; i < runs.size(); ++i) {
        const double e = runs[i]->error_at(fes);
        values[i] = std::isinf(e) ? e : snap_error(e);
      }
      s.median.push_back(stats::median(values));
      s.best.push_back(*std::min_element(values.begin(), values.end()));
      s.worst.push_back(*std::max_element(values.begin(), values.end()));
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Frame {
  double left = 70, right = 150, top = 40, bottom = 50, width = 720, height = 440;
  double x_lo = 1, x_hi = 6, y_lo = -8, y_hi = 2;

  double px(double log_x) const {
    return left + (log_x - x_lo) / (x_hi - x_lo) * (width - left - right);
  }
  double py(double log_y) const {
    return top + (y_hi - log_y) / (y_hi - y_lo) * (height - top - bottom);
  }
};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void polyline(std::ostringstream& os, const Frame& fr, const std::vector<double>& grid,
              const std::vector<double>& values, const char* color, bool dashed) {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << (dashed ? "1" : "2") << "\"";
  if (dashed) os << " stroke-dasharray=\"5 3\"";
  os << " points=\"";
  bool first = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::isinf(values[i])) continue;
    const double y = std::log10(std::max(values[i], kPlotFloor));
    if (!first) os << ' ';
    os << fmt2(fr.px(std::log10(grid[i]))) << ',' << fmt2(fr.py(y));
    first = false;
  }
  os << "\"/>\n";
}

}  // namespace

std::string emit_convergence_svg(std::span<const RunRecord> records, std::string_view title) {
  if (records.empty()) throw InvalidArgument("emit_convergence_svg: no records");
  std::int64_t max_fes = 10;
  for (const auto& r : records) max_fes = std::max(max_fes, r.max_fes);
  const auto grid = stats::ecd_grid(std::max<std::int64_t>(max_fes, 11));
  const auto series = convergence_series(records, grid);

  Frame fr;
  fr.x_lo = std::log10(grid.front());
  fr.x_hi = std::log10(grid.back());
  double top_val = kPlotFloor;
  for (const auto& s : series) {
    for (double v : s.worst) {
      if (!std::isinf(v)) top_val = std::max(top_val, v);
    }
  }
  fr.y_lo = std::log10(kPlotFloor);
  fr.y_hi = std::max(fr.y_lo + 1.0, std::ceil(std::log10(top_val)));

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fr.width << "\" height=\"" << fr.height
     << "\" viewBox=\"0 0 " << fr.width << ' ' << fr.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fr.width << "\" height=\"" << fr.height << "\" fill=\"white\"/>\n";
  if (!title.empty())
    os << "<text x=\"" << fmt2(fr.width / 2 - fr.right / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(title) << "</text>\n";

  const double x0 = fr.px(fr.x_lo), x1 = fr.px(fr.x_hi), y0 = fr.py(fr.y_lo), y1 = fr.py(fr.y_hi);
  os << "<g stroke=\"#999\" stroke-width=\"0.5\">\n";
  for (int e = static_cast<int>(std::ceil(fr.x_lo)); e <= static_cast<int>(std::floor(fr.x_hi)); ++e) {
    os << "<line x1=\"" << fmt2(fr.px(e)) << "\" y1=\"" << fmt2(y0) << "\" x2=\"" << fmt2(fr.px(e)) << "\" y2=\""
       << fmt2(y1) << "\"/>\n";
  }
  for (int e = static_cast<int>(fr.y_lo); e <= static_cast<int>(fr.y_hi); e += 2) {
    os << "<line x1=\"" << fmt2(x0) << "\" y1=\"" << fmt2(fr.py(e)) << "\" x2=\"" << fmt2(x1) << "\" y2=\""
       << fmt2(fr.py(e)) << "\"/>\n";
  }
  os << "</g>\n";
  os << "<rect x=\"" << fmt2(x0) << "\" y=\"" << fmt2(y1) << "\" width=\"" << fmt2(x1 - x0) << "\" height=\""
     << fmt2(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(fr.x_lo)); e <= static_cast<int>(std::floor(fr.x_hi)); ++e) {
    os << "<text x=\"" << fmt2(fr.px(e)) << "\" y=\"" << fmt2(y0 + 16) << "\" text-anchor=\"middle\">1e" << e
       << "</text>\n";
  }
  for (int e = static_cast<int>(fr.y_lo); e <= static_cast<int>(fr.y_hi); e += 2) {
    os << "<text x=\"" << fmt2(x0 - 6) << "\" y=\"" << fmt2(fr.py(e) + 4) << "\" text-anchor=\"end\">1e" << e
       << "</text>\n";
  }
  os << "<text x=\"" << fmt2((x0 + x1) / 2) << "\" y=\"" << fmt2(fr.height - 10)
     << "\" text-anchor=\"middle\">function evaluations</text>\n";
  os << "<text x=\"16\" y=\"" << fmt2((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fmt2((y0 + y1) / 2) << ")\">error</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % kPalette.size()];
    os << "<g id=\"" << escape(s.algorithm) << "\">\n";
    polyline(os, fr, s.grid, s.median, color, false);
    if (!s.deterministic) {
      polyline(os, fr, s.grid, s.best, color, true);
      polyline(os, fr, s.grid, s.worst, color, true);
    }
    os << "</g>\n";
    const double ly = fr.top + 14.0 * static_cast<double>(i);
    os << "<line x1=\"" << fmt2(x1 + 12) << "\" y1=\"" << fmt2(ly) << "\" x2=\"" << fmt2(x1 + 32) << "\" y2=\""
       << fmt2(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt2(x1 + 36) << "\" y=\"" << fmt2(ly + 4) << "\">" << escape(s.algorithm) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string emit_time_boxplot_data(std::span<const RunRecord> records) {
  if (records.empty()) throw InvalidArgument("emit_time_boxplot_data: no records");
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> times;
  for (const auto& r : records) {
    auto [it, inserted] = times.try_emplace(r.algorithm);
    if (inserted) order.push_back(r.algorithm);
    it->second.push_back(r.elapsed_seconds);
  }
  std::string out = "algorithm,min,q1,median,q3,max\n";
  for (const auto& algo : order) {
    const auto& t = times[algo];
    out += algo;
    for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) out += "," + format_exact(stats::quantile(t, q));
    out += "\n";
  }
  return out;
}

std::string trajectory_csv(const RunRecord& record) {
  std::string out = "fes,best_error\n";
  for (const auto& p : record.trajectory) out += std::to_string(p.fes) + "," + format_exact(p.best_error) + "\n";
  return out;
}

std::vector<TrajectoryPoint> parse_trajectory_csv(std::string_view text) {
  std::vector<TrajectoryPoint> out;
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line) || line != "fes,best_error") throw InvalidArgument("trajectory: bad header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument("trajectory: malformed line '" + line + "'");
    out.push_back({std::stoll(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return out;
}

}  // namespace dfo::report
