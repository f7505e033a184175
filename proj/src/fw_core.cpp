#include "fwdeep/fw_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fwdeep/errors.hpp"

namespace fwdeep {

namespace {

void require_finite(const ParamVector& v, const char* what) {
  // ParamVector already rejects non-finite entries; kept for default-constructed edge cases.
  if (!all_finite(v.values())) throw InvalidInput(std::string(what) + ": non-finite entry");
}

void require_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidInput("step size " + std::to_string(gamma) + " outside [0, 1]");
  }
}

// Same arithmetic as fw_step, so line-search values match the iterate actually taken.
std::vector<double> blend(const ParamVector& x, const LmoVertex& s, double gamma) {
  const double keep = 1.0 - gamma;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = keep * x[i];
  out[s.index] = keep * x[s.index] + gamma * s.signed_magnitude;
  return out;
}

}  // namespace

L1Ball::L1Ball(double radius) : radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("L1 ball radius must be positive and finite, got " + std::to_string(radius));
  }
}

bool L1Ball::contains(const ParamVector& x, double slack) const noexcept {
  return x.l1_norm() <= radius_ + slack;
}

ParamVector LmoVertex::densify() const {
  std::vector<double> v(dimension, 0.0);
  v.at(index) = signed_magnitude;
  return ParamVector(std::move(v));
}

LmoVertex l1_lmo(const ParamVector& gradient, const L1Ball& ball) {
  if (gradient.size() == 0) throw InvalidInput("l1_lmo: empty gradient");
  require_finite(gradient, "l1_lmo");
  std::size_t best = 0;
  double best_abs = std::abs(gradient[0]);
  for (std::size_t i = 1; i < gradient.size(); ++i) {
    const double a = std::abs(gradient[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  const double sign = gradient[best] < 0.0 ? -1.0 : 1.0;
  return {gradient.size(), best, -ball.radius() * sign};
}

LmoVertex brute_force_lmo(const ParamVector& gradient, const L1Ball& ball) {
  if (gradient.size() == 0) throw InvalidInput("brute_force_lmo: empty gradient");
  if (gradient.size() > kBruteForceLmoLimit) {
    throw InvalidInput("brute_force_lmo: dimension " + std::to_string(gradient.size()) +
                       " exceeds oracle limit " + std::to_string(kBruteForceLmoLimit));
  }
  require_finite(gradient, "brute_force_lmo");
  const double r = ball.radius();
  LmoVertex best{gradient.size(), 0, 0.0};
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    for (double magnitude : {-r, r}) {
      // <g, magnitude * e_i> over a densified vertex.
      LmoVertex candidate{gradient.size(), i, magnitude};
      const ParamVector dense = candidate.densify();
      double score = 0.0;
      for (std::size_t k = 0; k < dense.size(); ++k) score += gradient[k] * dense[k];
      if (score < best_score) {
        best_score = score;
        best = candidate;
      }
    }
  }
  return best;
}

ParamVector fw_step(const ParamVector& x, const LmoVertex& s, double gamma) {
  require_gamma(gamma);
  if (x.size() != s.dimension || s.index >= x.size()) {
    throw InvalidInput("fw_step: vertex dimension " + std::to_string(s.dimension) +
                       " does not match iterate dimension " + std::to_string(x.size()));
  }
  return ParamVector(blend(x, s, gamma));
}

double duality_gap(const ParamVector& gradient, const ParamVector& x, const LmoVertex& s) {
  if (gradient.size() != x.size() || s.dimension != x.size()) {
    throw InvalidInput("duality_gap: dimension mismatch");
  }
  return gradient.dot(x) - gradient[s.index] * s.signed_magnitude;
}

double gamma_decreasing(std::int64_t t) {
  if (t < 0) throw InvalidInput("gamma_decreasing: negative iteration " + std::to_string(t));
  return 2.0 / (2.0 + static_cast<double>(t));
}

double gamma_proportional(const ParamVector& gradient, double constant) {
  if (!(constant >= 0.0) || !std::isfinite(constant)) {
    throw InvalidInput("gamma_proportional: constant must be non-negative");
  }
  return std::min(1.0, constant * gradient.l2_norm());
}

double line_search_gamma(const Objective& objective, const ParamVector& x, const LmoVertex& s,
                         const LineSearchConfig& config) {
  if (config.grid_points < 1 || config.refine_steps < 0 || !(config.refine_step_size >= 0.0)) {
    throw InvalidInput("line_search_gamma: invalid configuration");
  }
  if (x.size() != s.dimension || s.index >= x.size()) {
    throw InvalidInput("line_search_gamma: vertex dimension mismatch");
  }

  auto phi = [&](double gamma) {
    const double v = objective.value(ParamVector(blend(x, s, gamma)));
    if (!std::isfinite(v)) throw NumericalError("line search: non-finite objective", gamma);
    return v;
  };

  double best_gamma = 0.0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < config.grid_points; ++k) {
    const double gamma = static_cast<double>(k) / config.grid_points;
    const double v = phi(gamma);
    if (v < best_value) {
      best_value = v;
      best_gamma = gamma;
    }
  }

  // Projected descent on gamma from the grid minimum. A step that raises phi is
  // rejected and the step size halved; each evaluation counts against refine_steps.
  auto evaluate = [&](double g) {
    const ValueAndGradient vg = objective.value_and_gradient(ParamVector(blend(x, s, g)));
    if (!std::isfinite(vg.value)) throw NumericalError("line search: non-finite objective", g);
    // phi'(g) = grad f^T (s - x)
    const double slope = vg.gradient[s.index] * s.signed_magnitude - vg.gradient.dot(x);
    if (!std::isfinite(slope)) throw NumericalError("line search: non-finite derivative", g);
    return std::pair{vg.value, slope};
  };

  if (config.refine_steps == 0) return best_gamma;
  double gamma = best_gamma;
  auto [value, slope] = evaluate(gamma);
  double step = config.refine_step_size;
  for (int k = 1; k < config.refine_steps; ++k) {
    const double next = std::clamp(gamma - step * slope, 0.0, 1.0);
    if (next == gamma) break;  // projected step is a fixed point
    const auto [next_value, next_slope] = evaluate(next);
    if (next_value <= value) {
      gamma = next;
      value = next_value;
      slope = next_slope;
    } else {
      step *= 0.5;
    }
  }
  return value < best_value ? gamma : best_gamma;
}

StepSizeRule StepSizeRule::fixed(double constant) {
  if (!(constant >= 0.0 && constant <= 1.0)) {
    throw InvalidInput("fixed step size must lie in [0, 1], got " + std::to_string(constant));
  }
  return {StepKind::Fixed, constant, {}};
}

StepSizeRule StepSizeRule::proportional(double constant) {
  if (!(constant >= 0.0) || !std::isfinite(constant)) {
    throw InvalidInput("proportional constant must be non-negative, got " + std::to_string(constant));
  }
  return {StepKind::Proportional, constant, {}};
}

StepSizeRule StepSizeRule::decreasing() { return {StepKind::Decreasing, 0.0, {}}; }

StepSizeRule StepSizeRule::line_search(LineSearchConfig config) {
  if (config.grid_points < 1 || config.refine_steps < 0 || !(config.refine_step_size >= 0.0)) {
    throw InvalidInput("invalid line-search configuration");
  }
  return {StepKind::LineSearch, 0.0, config};
}

double select_gamma(const StepSizeRule& rule, std::int64_t t, const ParamVector& gradient,
                    const Objective& objective, const ParamVector& x, const LmoVertex& s) {
  switch (rule.kind()) {
    case StepKind::Fixed:
      return rule.constant();
    case StepKind::Proportional:
      return gamma_proportional(gradient, rule.constant());
    case StepKind::Decreasing:
      return gamma_decreasing(t);
    case StepKind::LineSearch:
      return line_search_gamma(objective, x, s, rule.line_search_config());
  }
  throw InvalidInput("unknown step-size rule");
}

std::vector<FwRecord> fw_run(const Objective& objective, const L1Ball& ball, const ParamVector& x0,
                             const StepSizeRule& rule, int iterations) {
  if (iterations < 1) throw InvalidInput("fw_run: iterations must be >= 1");
  if (x0.size() != objective.dimension()) throw InvalidInput("fw_run: x0 dimension mismatch");
  if (!ball.contains(x0)) {
    throw InvalidInput("fw_run: x0 outside the L1 ball (|x0|_1 = " + std::to_string(x0.l1_norm()) +
                       ", radius " + std::to_string(ball.radius()) + ")");
  }

  std::vector<FwRecord> trajectory;
  trajectory.reserve(static_cast<std::size_t>(iterations) + 1);

  ParamVector x = x0;
  std::optional<double> incoming_gamma;
  for (std::int64_t t = 0;; ++t) {
    ValueAndGradient vg = objective.value_and_gradient(x);
    if (!std::isfinite(vg.value)) {
      throw NumericalError("fw_run: non-finite objective at iteration " + std::to_string(t),
                           static_cast<double>(t));
    }
    const LmoVertex s = l1_lmo(vg.gradient, ball);
    const double gap = duality_gap(vg.gradient, x, s);
    trajectory.push_back({FwState{x, t, gap}, vg.value, incoming_gamma});
    if (t == iterations) break;

    const double gamma = select_gamma(rule, t, vg.gradient, objective, x, s);
    x = fw_step(x, s, gamma);
    incoming_gamma = gamma;
  }
  return trajectory;
}

}  // namespace fwdeep
