#pragma once

// Frank-Wolfe over the closed L1 ball {x : sum_i |x_i| <= radius}.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fwdeep/objective.hpp"
#include "fwdeep/param_vector.hpp"

namespace fwdeep {

class L1Ball {
 public:
  explicit L1Ball(double radius);

  double radius() const noexcept { return radius_; }
  /// Closed-ball membership with an absolute slack for rounding.
  bool contains(const ParamVector& x, double slack = 0.0) const noexcept;

 private:
  double radius_;
};

/// A vertex signed_magnitude * e_index of the L1 ball in R^dimension.
struct LmoVertex {
  std::size_t dimension = 0;
  std::size_t index = 0;
  double signed_magnitude = 0.0;

  ParamVector densify() const;
  friend bool operator==(const LmoVertex&, const LmoVertex&) = default;
};

/// Vertex minimizing <gradient, s> over the ball: j = argmax |g_j| (lowest index
/// on ties), magnitude -radius * sign(g_j) with sign(0) = +1. O(n).
LmoVertex l1_lmo(const ParamVector& gradient, const L1Ball& ball);

inline constexpr std::size_t kBruteForceLmoLimit = 10'000;

/// Reference oracle: scores all 2n vertices explicitly and keeps the first
/// strict minimizer in the order -r e_0, +r e_0, -r e_1, +r e_1, ..., which
/// reproduces the l1_lmo tie conventions. Refuses dimensions above kBruteForceLmoLimit.
LmoVertex brute_force_lmo(const ParamVector& gradient, const L1Ball& ball);

/// (1 - gamma) x + gamma s, coordinate-wise. gamma must lie in [0, 1].
ParamVector fw_step(const ParamVector& x, const LmoVertex& s, double gamma);

/// gradient^T (x - s). Non-negative when s = l1_lmo(gradient) and x is feasible.
double duality_gap(const ParamVector& gradient, const ParamVector& x, const LmoVertex& s);

/// 2 / (2 + t).
double gamma_decreasing(std::int64_t t);

/// min(1, constant * ||gradient||_2).
double gamma_proportional(const ParamVector& gradient, double constant);

struct LineSearchConfig {
  /// Coarse grid {0, 1/grid_points, ..., (grid_points-1)/grid_points}; gamma = 1 is not on it.
  int grid_points = 100;
  /// Projected gradient steps on gamma started from the best grid point.
  int refine_steps = 100;
  double refine_step_size = 0.01;
};

/// Approximate argmin over [0,1] of phi(gamma) = f((1-gamma) x + gamma s).
/// Grid scan, then projected gradient descent on gamma with
/// phi'(gamma) = grad f(blend)^T (s - x) and projection = clamp to [0,1], started
/// at the best grid point. Descent steps that would raise phi are rejected and
/// halve the step size, so the result is never worse than the best grid point.
double line_search_gamma(const Objective& objective, const ParamVector& x, const LmoVertex& s,
                         const LineSearchConfig& config = {});

enum class StepKind { Fixed, Proportional, Decreasing, LineSearch };

class StepSizeRule {
 public:
  /// gamma_t = constant; constant in [0, 1] (0 freezes the iterate).
  static StepSizeRule fixed(double constant);
  /// gamma_t = min(1, constant * ||grad f(x_t)||_2); constant >= 0.
  static StepSizeRule proportional(double constant);
  static StepSizeRule decreasing();
  static StepSizeRule line_search(LineSearchConfig config = {});

  StepKind kind() const noexcept { return kind_; }
  double constant() const noexcept { return constant_; }
  const LineSearchConfig& line_search_config() const noexcept { return line_search_; }

 private:
  StepSizeRule(StepKind kind, double constant, LineSearchConfig ls)
      : kind_(kind), constant_(constant), line_search_(ls) {}

  StepKind kind_;
  double constant_;
  LineSearchConfig line_search_;
};

/// gamma for iteration t. `objective` is only consulted by the line-search rule.
double select_gamma(const StepSizeRule& rule, std::int64_t t, const ParamVector& gradient,
                    const Objective& objective, const ParamVector& x, const LmoVertex& s);

struct FwState {
  ParamVector x;
  std::int64_t t = 0;
  double last_gap = 0.0;
};

struct FwRecord {
  FwState state;
  double value = 0.0;
  /// Step size that produced this iterate; empty for t = 0.
  std::optional<double> gamma;
};

/// Runs `iterations` Frank-Wolfe steps from x0 and returns iterations + 1 records
/// (x_0 ... x_T), each with f(x_t) and the duality gap at x_t.
std::vector<FwRecord> fw_run(const Objective& objective, const L1Ball& ball, const ParamVector& x0,
                             const StepSizeRule& rule, int iterations);

}  // namespace fwdeep
