#include "fwdeep/objective.hpp"

#include <string>
#include <vector>

#include "fwdeep/errors.hpp"

namespace fwdeep {

double quadratic_eval(const ParamVector& x) {
  double s = 0.0;
  for (double v : x.values()) s += v * v;
  return s;
}

ParamVector quadratic_grad(const ParamVector& x) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * x[i];
  return ParamVector(std::move(g));
}

QuadraticObjective::QuadraticObjective(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw InvalidInput("QuadraticObjective: dimension must be >= 1");
}

double QuadraticObjective::value(const ParamVector& x) const {
  if (x.size() != dimension_) {
    throw InvalidInput("QuadraticObjective: expected dimension " + std::to_string(dimension_));
  }
  return quadratic_eval(x);
}

ParamVector QuadraticObjective::gradient(const ParamVector& x) const {
  if (x.size() != dimension_) {
    throw InvalidInput("QuadraticObjective: expected dimension " + std::to_string(dimension_));
  }
  return quadratic_grad(x);
}

}  // namespace fwdeep
