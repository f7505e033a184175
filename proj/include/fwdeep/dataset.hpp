#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace fwdeep {

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Sample {
  Point x;
  int label = 1;  // +1 inside the unit circle (boundary included), -1 outside
  friend bool operator==(const Sample&, const Sample&) = default;
};

int circle_label(Point p) noexcept;

/// Immutable, non-empty set of labeled points in [0,1]^2 that obey circle_label.
class Dataset {
 public:
  /// Throws InvalidInput on an empty set or on any sample that breaks the invariant.
  explicit Dataset(std::vector<Sample> samples, std::uint64_t seed = 0);

  std::span<const Sample> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.samples_ == b.samples_; }

 private:
  std::vector<Sample> samples_;
  std::uint64_t seed_;
};

/// n points i.i.d. uniform on [0,1]^2 drawn from Rng(seed): x1 then x2 per point.
Dataset generate(std::size_t n, std::uint64_t seed);

/// Header `x1,x2,y`; coordinates printed with 17 significant digits.
void save_csv(const Dataset& dataset, const std::filesystem::path& path);
/// Throws ParseError (with line number) on malformed rows and InvalidInput when no rows.
Dataset load_csv(const std::filesystem::path& path);

}  // namespace fwdeep
