#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fwdeep {

/// Dense real vector holding an optimization variable or a gradient.
/// Every entry is finite; construction from non-finite data throws NumericalError.
class ParamVector {
 public:
  ParamVector() = default;
  /// Zero vector of dimension n.
  explicit ParamVector(std::size_t n) : values_(n, 0.0) {}
  explicit ParamVector(std::vector<double> values);
  ParamVector(std::initializer_list<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }

  /// Hands the storage back to the caller, leaving this vector empty.
  std::vector<double> release() && { return std::move(values_); }

  double l1_norm() const noexcept;
  double l2_norm() const noexcept;
  double dot(const ParamVector& other) const;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> values_;
};

bool all_finite(std::span<const double> values) noexcept;

}  // namespace fwdeep
