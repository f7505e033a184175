#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>

namespace fwdeep {

/// mt19937_64 with explicit conversions, so streams are identical across
/// standard libraries (std::uniform_*_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (-a, a); the endpoint -a has probability 2^-53 and is remapped to 0.
  double uniform_symmetric(double a) {
    const double v = (2.0 * uniform01() - 1.0) * a;
    return v == -a ? 0.0 : v;
  }

  /// Uniform integer in [0, n) by rejection, n >= 1.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fwdeep
