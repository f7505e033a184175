#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fwdeep/dataset.hpp"
#include "fwdeep/fw_core.hpp"
#include "fwdeep/param_vector.hpp"
#include "fwdeep/rng.hpp"

namespace fwdeep {

enum class Method { FrankWolfe, GradientDescent };

struct Seeds {
  std::uint64_t init = 1;
  std::uint64_t train = 42;
  std::uint64_t test = 43;
  std::uint64_t shuffle = 11;
};

struct TrainConfig {
  Method method = Method::FrankWolfe;
  StepSizeRule rule = StepSizeRule::line_search();  // Frank-Wolfe only
  double learning_rate = 0.1;                        // gradient descent only
  double penalty = 0.1;                              // gradient descent only
  L1Ball ball{10.0};  // Frank-Wolfe feasible set; also scales the shared initialization
  int epochs = 300;
  std::optional<std::size_t> batch_size;  // empty: full batch
  Seeds seeds;
  bool use_biases = true;
  std::size_t train_size = 1000;
  std::size_t test_size = 1000;

  /// Throws InvalidInput when a field breaks its range.
  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // plain MSE on the whole training set after the epoch
  double test_accuracy = 0.0;
  std::optional<double> gamma;  // last Frank-Wolfe step of the epoch
  std::optional<double> gap;    // duality gap at the last Frank-Wolfe iterate of the epoch
  double l1_norm = 0.0;
  double wall_time_ms = 0.0;  // optimizer work only, metrics excluded
};

struct RunHistory {
  std::vector<EpochRecord> records;
  ParamVector final_params;
};

using EpochCallback = std::function<void(const EpochRecord&)>;
/// Called with the iteration counter t and x_{t+1} after every Frank-Wolfe step.
using IterateCallback = std::function<void(std::int64_t, const ParamVector&)>;

/// Fraction of samples with sign(output) == label, output 0 counting as +1.
double evaluate_accuracy(const ParamVector& params, std::span<const Sample> samples);

/// Line search on the training loss along x -> s: 100-point grid on [0, 0.99], then
/// 100 projected gradient steps of size 0.01 on gamma (defaults of LineSearchConfig).
double deep_line_search(const ParamVector& params, const LmoVertex& s,
                        std::span<const Sample> samples, const LineSearchConfig& config = {},
                        bool use_biases = true);
/// Same procedure on an arbitrary objective.
double deep_line_search(const Objective& objective, const ParamVector& params, const LmoVertex& s,
                        const LineSearchConfig& config = {});

/// One epoch's mini-batches: a Fisher-Yates shuffle of 0..n-1, cut into consecutive
/// chunks of batch_size (last one may be short), each chunk sorted ascending so the
/// loss is always accumulated in sample-index order.
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch_size, Rng& rng);

RunHistory train_full_fw(const TrainConfig& config, const Dataset& train, const Dataset& test,
                         const EpochCallback& on_epoch = {}, const IterateCallback& on_iterate = {});
RunHistory train_stochastic_fw(const TrainConfig& config, const Dataset& train, const Dataset& test,
                               const EpochCallback& on_epoch = {}, const IterateCallback& on_iterate = {});
/// Full-batch or mini-batch descent, unconstrained, from init_dense. Each step
/// follows the gradient of (1/B) sum_b r_b^2 + (penalty / N) |w|_1 over a batch of
/// size B, N the training-set size: a batch estimate of
/// (1/N) (sum_n r_n^2 + penalty |w|_1).
RunHistory train_gd(const TrainConfig& config, const Dataset& train, const Dataset& test,
                    const EpochCallback& on_epoch = {});

/// Dispatches on method and batch size.
RunHistory train(const TrainConfig& config, const Dataset& train, const Dataset& test,
                 const EpochCallback& on_epoch = {}, const IterateCallback& on_iterate = {});
/// Generates the train/test sets from the configured seeds, then trains.
RunHistory train(const TrainConfig& config, const EpochCallback& on_epoch = {},
                 const IterateCallback& on_iterate = {});

}  // namespace fwdeep
