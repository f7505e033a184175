#pragma once

// Experiment presets and drivers shared by the command-line tool and the
// acceptance suite.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fwdeep/dataset.hpp"
#include "fwdeep/fw_core.hpp"
#include "fwdeep/trainers.hpp"

namespace fwdeep::experiments {

enum class RuleName { Fixed, Prop, Decreasing, LineSearch };

/// "fixed", "prop", "decreasing", "linesearch".
std::string to_string(RuleName rule);
std::optional<RuleName> parse_rule(const std::string& text);

// ---------------------------------------------------------------- quadratic

struct QuadraticOptions {
  double radius = 1.0;
  int iterations = 1000;
  /// Empty: all four rules. Fixed and prop use `constant` (default 0.1).
  std::optional<RuleName> rule;
  double constant = 0.1;
};

struct QuadraticRun {
  RuleName rule;
  std::vector<FwRecord> trajectory;
};

/// f(x) = x1^2 + x2^2 from (0.5, 0.5).
std::vector<QuadraticRun> run_quadratic(const QuadraticOptions& options);

/// Writes quadratic_<rule>.csv per run and quadratic.svg (f against iteration, log scale).
std::vector<std::filesystem::path> write_quadratic(const std::vector<QuadraticRun>& runs,
                                                   const std::filesystem::path& out_dir);

// ---------------------------------------------------------------- training

struct MethodRun {
  std::string name;  // file stem: gd, fw_fixed, fw_prop, fw_decreasing, fw_linesearch
  TrainConfig config;
};

struct TrainSelection {
  bool stochastic = false;
  std::optional<std::size_t> batch_size;  // stochastic default 200; empty = full batch
  std::optional<Method> method;           // empty: the comparison set
  std::optional<RuleName> rule;           // implies Frank-Wolfe
  std::optional<double> constant;         // overrides the fixed/prop constant
  std::optional<double> learning_rate;
  std::optional<double> penalty;
  std::optional<double> radius;
  std::optional<int> epochs;              // overrides every per-method budget
  Seeds seeds;
  bool use_biases = true;
};

/// Expands a selection into concrete runs with the default constants and budgets:
/// full batch: GD lr 0.1 (300 epochs), FW fixed 3e-3 and prop 3e-2 (2000 epochs),
/// decreasing and line search (300 epochs); mini-batch: SGD lr 0.1, FW fixed and
/// prop 1e-4, line search, all 100 epochs with batch 200.
std::vector<MethodRun> plan_runs(const TrainSelection& selection);

struct TrainOutcome {
  MethodRun run;
  RunHistory history;
};

using Progress = std::function<void(const MethodRun&, const EpochRecord&)>;

/// Trains each run, then writes <name>.csv per run and accuracy.svg (test accuracy
/// per epoch). If any run fails, every file this call created is removed and the
/// error is rethrown.
std::vector<TrainOutcome> run_and_write(const std::vector<MethodRun>& runs, const Dataset& train_set,
                                        const Dataset& test_set, const std::filesystem::path& out_dir,
                                        bool record_wall_time = true, const Progress& progress = {});

}  // namespace fwdeep::experiments
