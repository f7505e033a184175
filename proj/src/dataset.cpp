#include "fwdeep/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

#include "fwdeep/errors.hpp"
#include "fwdeep/rng.hpp"

namespace fwdeep {

namespace {

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

std::string describe(const Sample& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "(%.17g, %.17g) label %d", s.x.x1, s.x.x2, s.label);
  return buf;
}

template <typename T>
bool parse_field(std::string_view field, T& out) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

int circle_label(Point p) noexcept { return p.x1 * p.x1 + p.x2 * p.x2 <= 1.0 ? 1 : -1; }

Dataset::Dataset(std::vector<Sample> samples, std::uint64_t seed)
    : samples_(std::move(samples)), seed_(seed) {
  if (samples_.empty()) throw InvalidInput("dataset must contain at least one sample");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (!in_unit_interval(s.x.x1) || !in_unit_interval(s.x.x2)) {
      throw InvalidInput("sample " + std::to_string(i) + " outside [0,1]^2: " + describe(s));
    }
    if (s.label != circle_label(s.x)) {
      throw InvalidInput("sample " + std::to_string(i) + " violates the circle label rule: " +
                         describe(s));
    }
  }
}

Dataset generate(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidInput("generate: n must be >= 1");
  Rng rng(seed);
  std::vector<Sample> samples(n);
  for (Sample& s : samples) {
    s.x.x1 = rng.uniform01();
    s.x.x2 = rng.uniform01();
    s.label = circle_label(s.x);
  }
  return Dataset(std::move(samples), seed);
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "x1,x2,y\n";
  char buf[96];
  for (const Sample& s : dataset.samples()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", s.x.x1, s.x.x2, s.label);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string source = path.string();

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw InvalidInput(source + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x1,x2,y") throw ParseError(source, line_no, "expected header 'x1,x2,y'");

  std::vector<Sample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::string_view row(line);
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(source, line_no, "expected 3 comma-separated fields");
    }
    Sample s;
    if (!parse_field(row.substr(0, c1), s.x.x1) ||
        !parse_field(row.substr(c1 + 1, c2 - c1 - 1), s.x.x2)) {
      throw ParseError(source, line_no, "malformed coordinate");
    }
    if (!parse_field(row.substr(c2 + 1), s.label)) throw ParseError(source, line_no, "malformed label");
    if (s.label != 1 && s.label != -1) {
      throw ParseError(source, line_no, "label must be -1 or +1, got " + std::to_string(s.label));
    }
    if (!in_unit_interval(s.x.x1) || !in_unit_interval(s.x.x2)) {
      throw ParseError(source, line_no, "coordinates outside [0,1]");
    }
    if (s.label != circle_label(s.x)) throw ParseError(source, line_no, "label disagrees with circle rule");
    samples.push_back(s);
  }
  if (samples.empty()) throw InvalidInput(source + ": dataset has no samples");
  return Dataset(std::move(samples));
}

}  // namespace fwdeep
