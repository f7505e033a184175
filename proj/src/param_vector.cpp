#include "fwdeep/param_vector.hpp"

#include <cmath>
#include <string>

#include "fwdeep/errors.hpp"

namespace fwdeep {

bool all_finite(std::span<const double> values) noexcept {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

ParamVector::ParamVector(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw NumericalError("non-finite entry at index " + std::to_string(i), static_cast<double>(i));
    }
  }
}

ParamVector::ParamVector(std::initializer_list<double> values)
    : ParamVector(std::vector<double>(values)) {}

double ParamVector::l1_norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += std::abs(v);
  return s;
}

double ParamVector::l2_norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double ParamVector::dot(const ParamVector& other) const {
  if (other.size() != size()) {
    throw InvalidInput("dot: dimension mismatch " + std::to_string(size()) + " vs " +
                       std::to_string(other.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * other.values_[i];
  return s;
}

}  // namespace fwdeep
