#include "fwdeep/history_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fwdeep/errors.hpp"

namespace fwdeep {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t comma = line.find(',', begin);
    fields.push_back(trim(line.substr(begin, comma == std::string_view::npos ? comma : comma - begin)));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return fields;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_history_csv(const RunHistory& history, const std::filesystem::path& path,
                       bool record_wall_time) {
  std::ofstream out = open_for_write(path);
  out << kHistoryHeader << '\n';
  for (const EpochRecord& r : history.records) {
    out << r.epoch << ',' << format_number(r.train_loss) << ',' << format_number(r.test_accuracy) << ','
        << optional_field(r.gamma) << ',' << optional_field(r.gap) << ',' << format_number(r.l1_norm)
        << ',' << format_number(record_wall_time ? r.wall_time_ms : 0.0) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_trajectory_csv(const std::vector<FwRecord>& trajectory, const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << kTrajectoryHeader << '\n';
  for (const FwRecord& r : trajectory) {
    if (r.state.x.size() != 2) throw InvalidInput("write_trajectory_csv: iterates must be 2-D");
    out << r.state.t << ',' << format_number(r.value) << ',' << optional_field(r.gamma) << ','
        << format_number(r.state.last_gap) << ',' << format_number(r.state.x[0]) << ','
        << format_number(r.state.x[1]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw InvalidInput("no column named '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string source = path.string();

  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(source, 1, "empty file");
  ++line_no;
  for (std::string_view name : split(line)) {
    if (name.empty()) throw ParseError(source, line_no, "empty column name");
    table.columns.emplace_back(name);
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != table.columns.size()) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(table.columns.size()) + " fields, got " +
                           std::to_string(fields.size()));
    }
    std::vector<std::optional<double>> row;
    row.reserve(fields.size());
    for (std::string_view f : fields) {
      if (f.empty()) {
        row.emplace_back();
        continue;
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(source, line_no, "not a number: '" + std::string(f) + "'");
      }
      row.emplace_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace fwdeep
