#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fwdeep {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 800;
  int height = 500;
};

/// Self-contained SVG line chart, one <polyline> per series plus a legend.
/// Output depends only on the arguments.
std::string render_svg(std::span<const Series> series, const PlotOptions& options);

/// Reads columns `x_column` and `y_column` of a CSV written by history_io; rows with
/// an empty y are skipped. The series is named after the file stem.
Series load_series(const std::filesystem::path& csv, const std::string& x_column,
                   const std::string& y_column);

/// Loads every CSV, renders, and only then writes `output`; nothing is written
/// when any input fails to load or has no data rows.
void plot_csv_files(std::span<const std::filesystem::path> csvs, const std::string& x_column,
                    const std::string& y_column, const PlotOptions& options,
                    const std::filesystem::path& output);

}  // namespace fwdeep
