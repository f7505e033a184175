#include "fwdeep/trainers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "fwdeep/errors.hpp"
#include "fwdeep/mlp.hpp"

namespace fwdeep {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::vector<Sample> gather(const Dataset& data, const std::vector<std::size_t>& indices) {
  std::vector<Sample> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(data[i]);
  return out;
}

EpochRecord measure(int epoch, const ParamVector& params, const Dataset& train, const Dataset& test,
                    double ms) {
  EpochRecord r;
  r.epoch = epoch;
  r.train_loss = mlp::batch_loss(params, train.samples());
  if (!std::isfinite(r.train_loss)) {
    throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch), epoch);
  }
  r.test_accuracy = evaluate_accuracy(params, test.samples());
  r.l1_norm = params.l1_norm();
  r.wall_time_ms = ms;
  return r;
}

struct FwOutcome {
  ParamVector next;
  double gamma;
  double gap;
};

// One Frank-Wolfe iteration on the loss over `batch`.
FwOutcome fw_iteration(const TrainConfig& config, const ParamVector& params,
                       std::span<const Sample> batch, std::int64_t t, int epoch) {
  const mlp::MlpObjective objective(batch, 0.0, config.use_biases);
  ValueAndGradient vg = objective.value_and_gradient(params);
  if (!std::isfinite(vg.value)) {
    throw NumericalError("non-finite loss at epoch " + std::to_string(epoch), epoch);
  }
  const LmoVertex s = l1_lmo(vg.gradient, config.ball);
  const double gap = duality_gap(vg.gradient, params, s);
  double gamma;
  try {
    gamma = select_gamma(config.rule, t, vg.gradient, objective, params, s);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " at epoch " + std::to_string(epoch), epoch);
  }
  return {fw_step(params, s, gamma), gamma, gap};
}

void require_method(const TrainConfig& config, Method method, const char* who) {
  config.validate();
  if (config.method != method) throw InvalidInput(std::string(who) + ": wrong method in config");
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidInput("epochs must be >= 1");
  if (batch_size && *batch_size < 1) throw InvalidInput("batch size must be >= 1");
  if (train_size < 1 || test_size < 1) throw InvalidInput("dataset sizes must be >= 1");
  if (method == Method::GradientDescent) {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw InvalidInput("learning rate must be positive");
    }
    if (!(penalty >= 0.0) || !std::isfinite(penalty)) throw InvalidInput("penalty must be non-negative");
  }
}

double evaluate_accuracy(const ParamVector& params, std::span<const Sample> samples) {
  if (samples.empty()) throw InvalidInput("evaluate_accuracy: empty dataset");
  const std::vector<double> out = mlp::predict(params, samples);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int predicted = out[i] >= 0.0 ? 1 : -1;
    if (predicted == samples[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

double deep_line_search(const ParamVector& params, const LmoVertex& s, std::span<const Sample> samples,
                        const LineSearchConfig& config, bool use_biases) {
  const mlp::MlpObjective objective(samples, 0.0, use_biases);
  return line_search_gamma(objective, params, s, config);
}

double deep_line_search(const Objective& objective, const ParamVector& params, const LmoVertex& s,
                        const LineSearchConfig& config) {
  return line_search_gamma(objective, params, s, config);
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch_size, Rng& rng) {
  if (n == 0 || batch_size == 0) throw InvalidInput("epoch_batches: n and batch size must be >= 1");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_index(i + 1)]);

  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t begin = 0; begin < n; begin += batch_size) {
    const std::size_t end = std::min(n, begin + batch_size);
    std::vector<std::size_t> batch(order.begin() + begin, order.begin() + end);
    std::sort(batch.begin(), batch.end());
    batches.push_back(std::move(batch));
  }
  return batches;
}

RunHistory train_full_fw(const TrainConfig& config, const Dataset& train, const Dataset& test,
                         const EpochCallback& on_epoch, const IterateCallback& on_iterate) {
  require_method(config, Method::FrankWolfe, "train_full_fw");
  ParamVector params = mlp::init_params(config.seeds.init, config.ball, config.use_biases);

  RunHistory history;
  history.records.reserve(config.epochs);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = Clock::now();
    FwOutcome step = fw_iteration(config, params, train.samples(), epoch - 1, epoch);
    params = std::move(step.next);
    if (on_iterate) on_iterate(epoch - 1, params);
    const double ms = elapsed_ms(start);

    EpochRecord record = measure(epoch, params, train, test, ms);
    record.gamma = step.gamma;
    record.gap = step.gap;
    history.records.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  history.final_params = std::move(params);
  return history;
}

RunHistory train_stochastic_fw(const TrainConfig& config, const Dataset& train, const Dataset& test,
                               const EpochCallback& on_epoch, const IterateCallback& on_iterate) {
  require_method(config, Method::FrankWolfe, "train_stochastic_fw");
  const std::size_t batch_size = config.batch_size.value_or(train.size());
  ParamVector params = mlp::init_params(config.seeds.init, config.ball, config.use_biases);
  Rng shuffle(config.seeds.shuffle);

  RunHistory history;
  history.records.reserve(config.epochs);
  std::int64_t t = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = Clock::now();
    double gamma = 0.0;
    double gap = 0.0;
    for (const auto& indices : epoch_batches(train.size(), batch_size, shuffle)) {
      const std::vector<Sample> batch = gather(train, indices);
      FwOutcome step = fw_iteration(config, params, batch, t, epoch);
      params = std::move(step.next);
      if (on_iterate) on_iterate(t, params);
      ++t;
      gamma = step.gamma;
      gap = step.gap;
    }
    const double ms = elapsed_ms(start);

    EpochRecord record = measure(epoch, params, train, test, ms);
    record.gamma = gamma;
    record.gap = gap;
    history.records.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  history.final_params = std::move(params);
  return history;
}

RunHistory train_gd(const TrainConfig& config, const Dataset& train, const Dataset& test,
                    const EpochCallback& on_epoch) {
  require_method(config, Method::GradientDescent, "train_gd");
  ParamVector params = mlp::init_dense(config.seeds.init, config.use_biases);
  Rng shuffle(config.seeds.shuffle);

  auto descend = [&](std::span<const Sample> batch, int epoch) {
    const mlp::MlpObjective objective(batch, config.penalty / static_cast<double>(train.size()), config.use_biases);
    ValueAndGradient vg = objective.value_and_gradient(params);
    if (!std::isfinite(vg.value)) {
      throw NumericalError("non-finite loss at epoch " + std::to_string(epoch), epoch);
    }
    std::vector<double> w = std::move(params).release();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= config.learning_rate * vg.gradient[i];
    if (!all_finite(w)) {
      throw NumericalError("non-finite parameters at epoch " + std::to_string(epoch), epoch);
    }
    params = ParamVector(std::move(w));
  };

  RunHistory history;
  history.records.reserve(config.epochs);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = Clock::now();
    if (!config.batch_size) {
      descend(train.samples(), epoch);
    } else {
      for (const auto& indices : epoch_batches(train.size(), *config.batch_size, shuffle)) {
        const std::vector<Sample> batch = gather(train, indices);
        descend(batch, epoch);
      }
    }
    const double ms = elapsed_ms(start);

    EpochRecord record = measure(epoch, params, train, test, ms);
    history.records.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  history.final_params = std::move(params);
  return history;
}

RunHistory train(const TrainConfig& config, const Dataset& train, const Dataset& test,
                 const EpochCallback& on_epoch, const IterateCallback& on_iterate) {
  if (config.method == Method::GradientDescent) return train_gd(config, train, test, on_epoch);
  if (config.batch_size) return train_stochastic_fw(config, train, test, on_epoch, on_iterate);
  return train_full_fw(config, train, test, on_epoch, on_iterate);
}

RunHistory train(const TrainConfig& config, const EpochCallback& on_epoch,
                 const IterateCallback& on_iterate) {
  config.validate();
  const Dataset train_set = generate(config.train_size, config.seeds.train);
  const Dataset test_set = generate(config.test_size, config.seeds.test);
  return train(config, train_set, test_set, on_epoch, on_iterate);
}

}  // namespace fwdeep
