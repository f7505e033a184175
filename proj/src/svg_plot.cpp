#include "fwdeep/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "fwdeep/errors.hpp"
#include "fwdeep/history_io.hpp"

namespace fwdeep {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};
constexpr int kMarginLeft = 80;
constexpr int kMarginRight = 170;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Step from {1, 2, 5} x 10^k giving roughly `target` intervals over span.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  const double fraction = raw / magnitude;
  const double nice = fraction <= 1.0 ? 1.0 : fraction <= 2.0 ? 2.0 : fraction <= 5.0 ? 5.0 : 10.0;
  return nice * magnitude;
}

struct Axis {
  double lo;
  double hi;
  std::vector<double> ticks;  // in axis units (log10 units for a log axis)
  bool log = false;
};

Axis linear_axis(double lo, double hi) {
  if (hi <= lo) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  const double step = nice_step(hi - lo, 6);
  Axis axis{std::floor(lo / step) * step, std::ceil(hi / step) * step, {}, false};
  for (double t = axis.lo; t <= axis.hi + step * 1e-9; t += step) axis.ticks.push_back(t);
  return axis;
}

Axis log_axis(double lo, double hi) {
  double a = std::floor(std::log10(lo));
  double b = std::ceil(std::log10(hi));
  if (b <= a) b = a + 1.0;
  Axis axis{a, b, {}, true};
  const double stride = std::max(1.0, std::ceil((b - a) / 8.0));
  for (double t = a; t <= b + 1e-9; t += stride) axis.ticks.push_back(t);
  return axis;
}

std::string tick_label(const Axis& axis, double t) {
  if (axis.log) return "1e" + fmt("%.0f", t);
  if (t == 0.0) return "0";
  if (std::abs(t) >= 1e4 || std::abs(t) < 1e-3) return fmt("%.1e", t);
  return fmt("%g", std::round(t * 1e6) / 1e6);
}

}  // namespace

std::string render_svg(std::span<const Series> series, const PlotOptions& options) {
  if (series.empty()) throw InvalidInput("render_svg: no series");
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  double y_floor = std::numeric_limits<double>::infinity();  // smallest positive y, for log scale
  for (const Series& s : series) {
    if (s.points.empty()) throw InvalidInput("render_svg: series '" + s.name + "' has no points");
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
      if (y > 0.0) y_floor = std::min(y_floor, y);
    }
  }
  if (!std::isfinite(y_floor)) y_floor = 1e-16;

  const Axis xa = linear_axis(x_lo, x_hi);
  const Axis ya = options.log_y ? log_axis(y_floor, std::max(y_hi, y_floor)) : linear_axis(y_lo, y_hi);

  const double plot_w = options.width - kMarginLeft - kMarginRight;
  const double plot_h = options.height - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - xa.lo) / (xa.hi - xa.lo) * plot_w; };
  auto py = [&](double y) {
    const double v = options.log_y ? std::log10(std::max(y, y_floor)) : y;
    return kMarginTop + (ya.hi - v) / (ya.hi - ya.lo) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << options.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(options.title) << "</text>\n";
  }

  svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : xa.ticks) {
    const std::string x = fmt("%.2f", px(t));
    svg << "<line x1=\"" << x << "\" y1=\"" << kMarginTop << "\" x2=\"" << x << "\" y2=\""
        << kMarginTop + plot_h << "\"/>\n";
  }
  for (double t : ya.ticks) {
    const double yy = kMarginTop + (ya.hi - t) / (ya.hi - ya.lo) * plot_h;
    const std::string y = fmt("%.2f", yy);
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << y << "\" x2=\"" << kMarginLeft + plot_w
        << "\" y2=\"" << y << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : xa.ticks) {
    svg << "<text x=\"" << fmt("%.2f", px(t)) << "\" y=\"" << kMarginTop + plot_h + 16
        << "\" text-anchor=\"middle\">" << escape(tick_label(xa, t)) << "</text>\n";
  }
  for (double t : ya.ticks) {
    const double yy = kMarginTop + (ya.hi - t) / (ya.hi - ya.lo) * plot_h;
    svg << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << fmt("%.2f", yy + 4)
        << "\" text-anchor=\"end\">" << escape(tick_label(ya, t)) << "</text>\n";
  }
  if (!options.x_label.empty()) {
    svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << options.height - 12
        << "\" text-anchor=\"middle\">" << escape(options.x_label) << "</text>\n";
  }
  if (!options.y_label.empty()) {
    svg << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << kMarginTop + plot_h / 2 << ")\">" << escape(options.y_label) << "</text>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[k].points.size(); ++i) {
      const auto& [x, y] = series[k].points[i];
      svg << (i ? " " : "") << fmt("%.2f", px(x)) << ',' << fmt("%.2f", py(y));
    }
    svg << "\"/>\n";

    const double ly = kMarginTop + 14 + 20.0 * static_cast<double>(k);
    const double lx = kMarginLeft + plot_w + 12;
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 22 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << lx + 28 << "\" y=\"" << ly + 4 << "\">" << escape(series[k].name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

Series load_series(const std::filesystem::path& csv, const std::string& x_column,
                   const std::string& y_column) {
  const CsvTable table = read_csv(csv);
  const auto missing = [&](const std::string& name) {
    return ParseError(csv.string(), 1, "missing column '" + name + "'");
  };
  if (std::find(table.columns.begin(), table.columns.end(), x_column) == table.columns.end()) {
    throw missing(x_column);
  }
  if (std::find(table.columns.begin(), table.columns.end(), y_column) == table.columns.end()) {
    throw missing(y_column);
  }
  const std::size_t xi = table.column(x_column);
  const std::size_t yi = table.column(y_column);

  Series s{csv.stem().string(), {}};
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (!row[yi]) continue;
    if (!row[xi]) throw ParseError(csv.string(), r + 2, "empty '" + x_column + "' field");
    s.points.emplace_back(*row[xi], *row[yi]);
  }
  if (s.points.empty()) throw ParseError(csv.string(), table.rows.size() + 1, "no data rows");
  return s;
}

void plot_csv_files(std::span<const std::filesystem::path> csvs, const std::string& x_column,
                    const std::string& y_column, const PlotOptions& options,
                    const std::filesystem::path& output) {
  if (csvs.empty()) throw InvalidInput("plot: no input files");
  std::vector<Series> series;
  for (const auto& csv : csvs) series.push_back(load_series(csv, x_column, y_column));
  const std::string svg = render_svg(series, options);

  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + output.string() + " for writing");
  out << svg;
  if (!out) throw std::runtime_error("write failed: " + output.string());
}

}  // namespace fwdeep
