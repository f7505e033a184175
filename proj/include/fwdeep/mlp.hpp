#pragma once

// Fully connected 2-25-25-25-1 network with ReLU hidden layers and a tanh output.
//
// Flat parameter layout, layer by layer: the fan_out x fan_in weight matrix
// (row-major, row = output neuron) followed by the fan_out biases.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fwdeep/dataset.hpp"
#include "fwdeep/fw_core.hpp"
#include "fwdeep/objective.hpp"
#include "fwdeep/param_vector.hpp"

namespace fwdeep::mlp {

inline constexpr std::array<std::size_t, 5> kLayerDims{2, 25, 25, 25, 1};
inline constexpr std::size_t kLayerCount = kLayerDims.size() - 1;

struct LayerSlice {
  std::size_t fan_in;
  std::size_t fan_out;
  std::size_t weight_offset;
  std::size_t bias_offset;
};

constexpr std::array<LayerSlice, kLayerCount> layer_slices() {
  std::array<LayerSlice, kLayerCount> out{};
  std::size_t offset = 0;
  for (std::size_t l = 0; l < kLayerCount; ++l) {
    const std::size_t in = kLayerDims[l];
    const std::size_t fan_out = kLayerDims[l + 1];
    out[l] = {in, fan_out, offset, offset + in * fan_out};
    offset += in * fan_out + fan_out;
  }
  return out;
}

inline constexpr std::array<LayerSlice, kLayerCount> kLayers = layer_slices();
inline constexpr std::size_t kParamCount = kLayers.back().bias_offset + kLayers.back().fan_out;
static_assert(kParamCount == 1401);

bool is_bias_index(std::size_t i) noexcept;

struct Layer {
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  std::vector<double> weights;  // fan_out x fan_in, row-major
  std::vector<double> biases;   // fan_out
};

/// Structured view of the parameters; flatten/unflatten is an exact bijection.
struct MlpModel {
  std::array<Layer, kLayerCount> layers;

  static MlpModel unflatten(const ParamVector& flat);
  ParamVector flatten() const;
};

/// Feasible starting point for Frank-Wolfe. Every entry is drawn per layer from
/// U(-a, a), a = sqrt(6 / (fan_in + fan_out)), by Rng(seed); then only a random
/// subnetwork with `active_width` units per hidden layer is kept (all other
/// weights and biases zero) and, if |w|_1 > 0.99 * radius, the vector is scaled
/// onto |w|_1 = 0.99 * radius. With `use_biases` false all biases are zero.
ParamVector init_params(std::uint64_t seed, const L1Ball& ball, bool use_biases = true,
                        std::size_t active_width = 4);

/// The same draw with every unit active and no scaling, for unconstrained training.
ParamVector init_dense(std::uint64_t seed, bool use_biases = true);

double forward(const ParamVector& params, Point input);

struct BatchGradient {
  ParamVector grad;
  double loss = 0.0;
};

/// Mean squared error (1/B) sum_b (forward(x_b) - y_b)^2 and its exact gradient.
/// The ReLU derivative at 0 is taken as 0. Blocked kernel, OpenMP-parallel over
/// fixed sample blocks that are reduced in index order, so the result does not
/// depend on the thread count.
BatchGradient batch_loss_and_grad(const ParamVector& params, std::span<const Sample> batch);

/// Forward-only mean squared error with the same blocking as batch_loss_and_grad.
double batch_loss(const ParamVector& params, std::span<const Sample> batch);

/// MSE + penalty * |w|_1, gradient MSE grad + penalty * sign(w) with sign(0) = 0.
BatchGradient penalized_loss_and_grad(const ParamVector& params, std::span<const Sample> batch,
                                      double penalty);

/// Network outputs for a set of inputs (blocked kernel).
std::vector<double> predict(const ParamVector& params, std::span<const Sample> samples);

/// Training loss over a fixed sample set seen as an Objective over the flat parameters.
/// With `use_biases` false the bias coordinates of the gradient are reported as zero,
/// which pins zero-initialized biases under both Frank-Wolfe and gradient steps.
class MlpObjective final : public Objective {
 public:
  explicit MlpObjective(std::span<const Sample> samples, double penalty = 0.0,
                        bool use_biases = true);

  std::size_t dimension() const override { return kParamCount; }
  double value(const ParamVector& params) const override;
  ParamVector gradient(const ParamVector& params) const override;
  ValueAndGradient value_and_gradient(const ParamVector& params) const override;

 private:
  std::span<const Sample> samples_;
  double penalty_;
  bool use_biases_;
};

namespace reference {

// Straightforward per-sample implementation over MlpModel, kept for testing the
// blocked kernels and for benchmarking against them.

double forward(const MlpModel& model, Point input);
double loss(const ParamVector& params, std::span<const Sample> batch);
BatchGradient loss_and_grad(const ParamVector& params, std::span<const Sample> batch);

}  // namespace reference

}  // namespace fwdeep::mlp
