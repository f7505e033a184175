#pragma once

#include <cstddef>

#include "fwdeep/param_vector.hpp"

namespace fwdeep {

struct ValueAndGradient {
  double value;
  ParamVector gradient;
};

/// A differentiable function f : R^n -> R.
/// Implementations are deterministic and safe to call concurrently.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(const ParamVector& x) const = 0;
  virtual ParamVector gradient(const ParamVector& x) const = 0;

  /// Value and gradient together; override when one pass yields both.
  virtual ValueAndGradient value_and_gradient(const ParamVector& x) const {
    return {value(x), gradient(x)};
  }
};

/// f(x) = sum_i x_i^2. In two dimensions this is the benchmark bowl x1^2 + x2^2.
class QuadraticObjective final : public Objective {
 public:
  explicit QuadraticObjective(std::size_t dimension = 2);

  std::size_t dimension() const override { return dimension_; }
  double value(const ParamVector& x) const override;
  ParamVector gradient(const ParamVector& x) const override;

 private:
  std::size_t dimension_;
};

double quadratic_eval(const ParamVector& x);
ParamVector quadratic_grad(const ParamVector& x);

}  // namespace fwdeep
