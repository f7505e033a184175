#include "fwdeep/mlp.hpp"

#include <cmath>
#include <string>

#include "fwdeep/errors.hpp"
#include "fwdeep/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fwdeep::mlp {

namespace {

constexpr std::size_t kHidden = 25;
static_assert(kLayerDims[0] == 2 && kLayerDims[1] == kHidden && kLayerDims[2] == kHidden &&
              kLayerDims[3] == kHidden && kLayerDims[4] == 1);

// Samples per kernel block. Blocks are the unit of parallel work and of the
// fixed-order reduction.
constexpr std::size_t kBlock = 64;

struct Workspace {
  alignas(64) double x0[kBlock];
  alignas(64) double x1[kBlock];
  alignas(64) double y[kBlock];
  alignas(64) double a1[kHidden * kBlock];
  alignas(64) double a2[kHidden * kBlock];
  alignas(64) double a3[kHidden * kBlock];
  alignas(64) double out[kBlock];
  alignas(64) double d4[kBlock];
  alignas(64) double d3[kHidden * kBlock];
  alignas(64) double d2[kHidden * kBlock];
  alignas(64) double d1[kHidden * kBlock];
};

Workspace& thread_workspace() {
  thread_local Workspace ws;
  return ws;
}

double dot(const double* a, const double* b, std::size_t m) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= m; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < m; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

double sum(const double* a, std::size_t m) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= m; k += 4) {
    s0 += a[k];
    s1 += a[k + 1];
    s2 += a[k + 2];
    s3 += a[k + 3];
  }
  for (; k < m; ++k) s0 += a[k];
  return (s0 + s1) + (s2 + s3);
}

// next = relu(W prev + b) for a hidden-to-hidden layer, activations stored neuron-major.
void hidden_forward(const double* w, const double* b, const double* prev, double* next,
                    std::size_t m) {
  for (std::size_t j = 0; j < kHidden; ++j) {
    double* row = next + j * kBlock;
    for (std::size_t k = 0; k < m; ++k) row[k] = b[j];
    for (std::size_t i = 0; i < kHidden; ++i) {
      const double wji = w[j * kHidden + i];
      const double* src = prev + i * kBlock;
      for (std::size_t k = 0; k < m; ++k) row[k] += wji * src[k];
    }
    for (std::size_t k = 0; k < m; ++k) row[k] = row[k] > 0.0 ? row[k] : 0.0;
  }
}

// Weight/bias gradients of a hidden-to-hidden layer and the masked delta of its input.
void hidden_backward(const double* w, const double* delta, const double* prev, double* grad_w,
                     double* grad_b, double* delta_prev, std::size_t m) {
  for (std::size_t j = 0; j < kHidden; ++j) {
    const double* dj = delta + j * kBlock;
    for (std::size_t i = 0; i < kHidden; ++i) grad_w[j * kHidden + i] = dot(dj, prev + i * kBlock, m);
    grad_b[j] = sum(dj, m);
  }
  for (std::size_t i = 0; i < kHidden * kBlock; ++i) delta_prev[i] = 0.0;
  for (std::size_t j = 0; j < kHidden; ++j) {
    const double* dj = delta + j * kBlock;
    for (std::size_t i = 0; i < kHidden; ++i) {
      const double wji = w[j * kHidden + i];
      double* di = delta_prev + i * kBlock;
      for (std::size_t k = 0; k < m; ++k) di[k] += wji * dj[k];
    }
  }
  for (std::size_t i = 0; i < kHidden; ++i) {
    double* di = delta_prev + i * kBlock;
    const double* ai = prev + i * kBlock;
    for (std::size_t k = 0; k < m; ++k) di[k] = ai[k] > 0.0 ? di[k] : 0.0;
  }
}

// Forward pass over one block; returns the block's sum of squared errors.
double forward_block(const double* p, std::span<const Sample> block, Workspace& ws) {
  const std::size_t m = block.size();
  for (std::size_t k = 0; k < m; ++k) {
    ws.x0[k] = block[k].x.x1;
    ws.x1[k] = block[k].x.x2;
    ws.y[k] = static_cast<double>(block[k].label);
  }

  const double* w1 = p + kLayers[0].weight_offset;
  const double* b1 = p + kLayers[0].bias_offset;
  for (std::size_t j = 0; j < kHidden; ++j) {
    const double u = w1[2 * j], v = w1[2 * j + 1], b = b1[j];
    double* row = ws.a1 + j * kBlock;
    for (std::size_t k = 0; k < m; ++k) {
      const double z = b + u * ws.x0[k] + v * ws.x1[k];
      row[k] = z > 0.0 ? z : 0.0;
    }
  }
  hidden_forward(p + kLayers[1].weight_offset, p + kLayers[1].bias_offset, ws.a1, ws.a2, m);
  hidden_forward(p + kLayers[2].weight_offset, p + kLayers[2].bias_offset, ws.a2, ws.a3, m);

  const double* w4 = p + kLayers[3].weight_offset;
  const double b4 = p[kLayers[3].bias_offset];
  for (std::size_t k = 0; k < m; ++k) ws.out[k] = b4;
  for (std::size_t i = 0; i < kHidden; ++i) {
    const double wi = w4[i];
    const double* src = ws.a3 + i * kBlock;
    for (std::size_t k = 0; k < m; ++k) ws.out[k] += wi * src[k];
  }
  double sse = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    ws.out[k] = std::tanh(ws.out[k]);
    const double r = ws.out[k] - ws.y[k];
    sse += r * r;
  }
  return sse;
}

// Writes the block's contribution to d(MSE)/dparams into g (all kParamCount entries).
void backward_block(const double* p, std::size_t m, double scale, Workspace& ws, double* g) {
  for (std::size_t k = 0; k < m; ++k) {
    const double o = ws.out[k];
    ws.d4[k] = scale * (o - ws.y[k]) * (1.0 - o * o);
  }

  const double* w4 = p + kLayers[3].weight_offset;
  double* gw4 = g + kLayers[3].weight_offset;
  for (std::size_t i = 0; i < kHidden; ++i) gw4[i] = dot(ws.d4, ws.a3 + i * kBlock, m);
  g[kLayers[3].bias_offset] = sum(ws.d4, m);
  for (std::size_t i = 0; i < kHidden; ++i) {
    const double wi = w4[i];
    const double* ai = ws.a3 + i * kBlock;
    double* di = ws.d3 + i * kBlock;
    for (std::size_t k = 0; k < m; ++k) di[k] = ai[k] > 0.0 ? wi * ws.d4[k] : 0.0;
  }

  hidden_backward(p + kLayers[2].weight_offset, ws.d3, ws.a2, g + kLayers[2].weight_offset,
                  g + kLayers[2].bias_offset, ws.d2, m);
  hidden_backward(p + kLayers[1].weight_offset, ws.d2, ws.a1, g + kLayers[1].weight_offset,
                  g + kLayers[1].bias_offset, ws.d1, m);

  double* gw1 = g + kLayers[0].weight_offset;
  double* gb1 = g + kLayers[0].bias_offset;
  for (std::size_t j = 0; j < kHidden; ++j) {
    const double* dj = ws.d1 + j * kBlock;
    gw1[2 * j] = dot(dj, ws.x0, m);
    gw1[2 * j + 1] = dot(dj, ws.x1, m);
    gb1[j] = sum(dj, m);
  }
}

void require_params(const ParamVector& params) {
  if (params.size() != kParamCount) {
    throw InvalidInput("expected " + std::to_string(kParamCount) + " parameters, got " +
                       std::to_string(params.size()));
  }
}

void require_batch(std::span<const Sample> batch) {
  if (batch.empty()) throw InvalidInput("empty batch");
}

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

std::span<const Sample> block_at(std::span<const Sample> batch, std::size_t b) {
  const std::size_t begin = b * kBlock;
  return batch.subspan(begin, std::min(kBlock, batch.size() - begin));
}

}  // namespace

bool is_bias_index(std::size_t i) noexcept {
  for (const LayerSlice& l : kLayers) {
    if (i >= l.bias_offset && i < l.bias_offset + l.fan_out) return true;
  }
  return false;
}

MlpModel MlpModel::unflatten(const ParamVector& flat) {
  require_params(flat);
  MlpModel model;
  for (std::size_t l = 0; l < kLayerCount; ++l) {
    const LayerSlice& s = kLayers[l];
    Layer& layer = model.layers[l];
    layer.fan_in = s.fan_in;
    layer.fan_out = s.fan_out;
    const auto v = flat.values();
    layer.weights.assign(v.begin() + s.weight_offset, v.begin() + s.bias_offset);
    layer.biases.assign(v.begin() + s.bias_offset, v.begin() + s.bias_offset + s.fan_out);
  }
  return model;
}

ParamVector MlpModel::flatten() const {
  std::vector<double> flat;
  flat.reserve(kParamCount);
  for (std::size_t l = 0; l < kLayerCount; ++l) {
    const Layer& layer = layers[l];
    if (layer.fan_in != kLayers[l].fan_in || layer.fan_out != kLayers[l].fan_out ||
        layer.weights.size() != layer.fan_in * layer.fan_out || layer.biases.size() != layer.fan_out) {
      throw InvalidInput("MlpModel::flatten: layer " + std::to_string(l) + " has wrong shape");
    }
    flat.insert(flat.end(), layer.weights.begin(), layer.weights.end());
    flat.insert(flat.end(), layer.biases.begin(), layer.biases.end());
  }
  return ParamVector(std::move(flat));
}

namespace {

// Glorot-uniform draw of every entry plus the masked, ball-scaled variant.
std::vector<double> draw_params(std::uint64_t seed, bool use_biases, std::size_t active_width) {
  if (active_width < 1 || active_width > kHidden) {
    throw InvalidInput("init: active width must lie in [1, " + std::to_string(kHidden) + "]");
  }
  Rng rng(seed);

  // Active units per layer. Inputs and the output unit are always active.
  std::array<std::vector<bool>, kLayerCount + 1> active;
  for (std::size_t l = 0; l <= kLayerCount; ++l) {
    const std::size_t width = kLayerDims[l];
    std::vector<std::size_t> order(width);
    for (std::size_t i = 0; i < width; ++i) order[i] = i;
    for (std::size_t i = width - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_index(i + 1)]);
    const bool hidden = l != 0 && l != kLayerCount;
    active[l].assign(width, !hidden);
    if (hidden) {
      for (std::size_t i = 0; i < active_width; ++i) active[l][order[i]] = true;
    }
  }

  std::vector<double> w(kParamCount, 0.0);
  for (std::size_t l = 0; l < kLayerCount; ++l) {
    const LayerSlice& s = kLayers[l];
    const double a = std::sqrt(6.0 / static_cast<double>(s.fan_in + s.fan_out));
    for (std::size_t j = 0; j < s.fan_out; ++j) {
      for (std::size_t i = 0; i < s.fan_in; ++i) {
        // Every entry is drawn; inactive ones are then dropped.
        const double v = rng.uniform_symmetric(a);
        if (active[l + 1][j] && active[l][i]) w[s.weight_offset + j * s.fan_in + i] = v;
      }
    }
    for (std::size_t j = 0; j < s.fan_out; ++j) {
      const double v = rng.uniform_symmetric(a);
      if (use_biases && active[l + 1][j]) w[s.bias_offset + j] = v;
    }
  }
  return w;
}

}  // namespace

ParamVector init_params(std::uint64_t seed, const L1Ball& ball, bool use_biases,
                        std::size_t active_width) {
  std::vector<double> w = draw_params(seed, use_biases, active_width);
  const double target = 0.99 * ball.radius();
  double norm = 0.0;
  for (double v : w) norm += std::abs(v);
  if (norm > target) {
    double factor = target / norm;
    for (;;) {
      double scaled = 0.0;
      for (double v : w) scaled += std::abs(v * factor);
      if (scaled <= target) break;
      factor = std::nextafter(factor, 0.0);
    }
    for (double& v : w) v *= factor;
  }
  return ParamVector(std::move(w));
}

ParamVector init_dense(std::uint64_t seed, bool use_biases) {
  return ParamVector(draw_params(seed, use_biases, kHidden));
}

double forward(const ParamVector& params, Point input) {
  require_params(params);
  const Sample sample{input, circle_label(input)};
  Workspace& ws = thread_workspace();
  forward_block(params.data(), std::span<const Sample>(&sample, 1), ws);
  return ws.out[0];
}

std::vector<double> predict(const ParamVector& params, std::span<const Sample> samples) {
  require_params(params);
  std::vector<double> out(samples.size());
  const auto blocks = static_cast<std::ptrdiff_t>(block_count(samples.size()));
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    Workspace& ws = thread_workspace();
    const auto block = block_at(samples, static_cast<std::size_t>(b));
    forward_block(params.data(), block, ws);
    std::copy(ws.out, ws.out + block.size(), out.begin() + b * static_cast<std::ptrdiff_t>(kBlock));
  }
  return out;
}

double batch_loss(const ParamVector& params, std::span<const Sample> batch) {
  require_params(params);
  require_batch(batch);
  const std::size_t n_blocks = block_count(batch.size());
  std::vector<double> sse(n_blocks);
  const auto blocks = static_cast<std::ptrdiff_t>(n_blocks);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    sse[b] = forward_block(params.data(), block_at(batch, static_cast<std::size_t>(b)),
                           thread_workspace());
  }
  double total = 0.0;
  for (double v : sse) total += v;
  return total / static_cast<double>(batch.size());
}

BatchGradient batch_loss_and_grad(const ParamVector& params, std::span<const Sample> batch) {
  require_params(params);
  require_batch(batch);
  const std::size_t n_blocks = block_count(batch.size());
  const double scale = 2.0 / static_cast<double>(batch.size());
  std::vector<double> sse(n_blocks);
  std::vector<double> partial(n_blocks * kParamCount);
  const auto blocks = static_cast<std::ptrdiff_t>(n_blocks);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    Workspace& ws = thread_workspace();
    const auto block = block_at(batch, static_cast<std::size_t>(b));
    sse[b] = forward_block(params.data(), block, ws);
    backward_block(params.data(), block.size(), scale, ws, partial.data() + b * kParamCount);
  }

  std::vector<double> grad(partial.begin(), partial.begin() + kParamCount);
  double total = sse[0];
  for (std::size_t b = 1; b < n_blocks; ++b) {
    total += sse[b];
    const double* g = partial.data() + b * kParamCount;
    for (std::size_t i = 0; i < kParamCount; ++i) grad[i] += g[i];
  }
  const double loss = total / static_cast<double>(batch.size());
  if (!std::isfinite(loss)) throw NumericalError("non-finite batch loss", 0.0);
  return {ParamVector(std::move(grad)), loss};
}

BatchGradient penalized_loss_and_grad(const ParamVector& params, std::span<const Sample> batch,
                                      double penalty) {
  if (!(penalty >= 0.0) || !std::isfinite(penalty)) {
    throw InvalidInput("penalty must be non-negative, got " + std::to_string(penalty));
  }
  BatchGradient bg = batch_loss_and_grad(params, batch);
  if (penalty == 0.0) return bg;
  std::vector<double> grad = std::move(bg.grad).release();
  double l1 = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double w = params[i];
    l1 += std::abs(w);
    if (w > 0.0) grad[i] += penalty;
    if (w < 0.0) grad[i] -= penalty;
  }
  return {ParamVector(std::move(grad)), bg.loss + penalty * l1};
}

MlpObjective::MlpObjective(std::span<const Sample> samples, double penalty, bool use_biases)
    : samples_(samples), penalty_(penalty), use_biases_(use_biases) {
  require_batch(samples);
  if (!(penalty >= 0.0) || !std::isfinite(penalty)) throw InvalidInput("penalty must be non-negative");
}

double MlpObjective::value(const ParamVector& params) const {
  const double mse = batch_loss(params, samples_);
  return penalty_ == 0.0 ? mse : mse + penalty_ * params.l1_norm();
}

ParamVector MlpObjective::gradient(const ParamVector& params) const {
  return value_and_gradient(params).gradient;
}

ValueAndGradient MlpObjective::value_and_gradient(const ParamVector& params) const {
  BatchGradient bg = penalized_loss_and_grad(params, samples_, penalty_);
  if (use_biases_) return {bg.loss, std::move(bg.grad)};
  std::vector<double> grad = std::move(bg.grad).release();
  for (const LayerSlice& l : kLayers) {
    for (std::size_t i = l.bias_offset; i < l.bias_offset + l.fan_out; ++i) grad[i] = 0.0;
  }
  return {bg.loss, ParamVector(std::move(grad))};
}

namespace reference {

namespace {

struct Trace {
  // activations[l] is the input of layer l; activations[kLayerCount] is the output.
  std::array<std::vector<double>, kLayerCount + 1> activations;
};

Trace run_forward(const MlpModel& model, Point input) {
  Trace trace;
  trace.activations[0] = {input.x1, input.x2};
  for (std::size_t l = 0; l < kLayerCount; ++l) {
    const Layer& layer = model.layers[l];
    const std::vector<double>& in = trace.activations[l];
    std::vector<double>& out = trace.activations[l + 1];
    out.assign(layer.fan_out, 0.0);
    for (std::size_t j = 0; j < layer.fan_out; ++j) {
      double z = layer.biases[j];
      for (std::size_t i = 0; i < layer.fan_in; ++i) z += layer.weights[j * layer.fan_in + i] * in[i];
      out[j] = l + 1 == kLayerCount ? std::tanh(z) : std::max(z, 0.0);
    }
  }
  return trace;
}

}  // namespace

double forward(const MlpModel& model, Point input) {
  return run_forward(model, input).activations[kLayerCount][0];
}

double loss(const ParamVector& params, std::span<const Sample> batch) {
  require_batch(batch);
  const MlpModel model = MlpModel::unflatten(params);
  double total = 0.0;
  for (const Sample& s : batch) {
    const double r = forward(model, s.x) - s.label;
    total += r * r;
  }
  return total / static_cast<double>(batch.size());
}

BatchGradient loss_and_grad(const ParamVector& params, std::span<const Sample> batch) {
  require_batch(batch);
  const MlpModel model = MlpModel::unflatten(params);
  MlpModel grad = model;
  for (Layer& layer : grad.layers) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
  }

  const double n = static_cast<double>(batch.size());
  double total = 0.0;
  for (const Sample& s : batch) {
    const Trace trace = run_forward(model, s.x);
    const double out = trace.activations[kLayerCount][0];
    total += (out - s.label) * (out - s.label);

    std::vector<double> delta{2.0 * (out - s.label) / n * (1.0 - out * out)};
    for (std::size_t l = kLayerCount; l-- > 0;) {
      const Layer& layer = model.layers[l];
      Layer& g = grad.layers[l];
      const std::vector<double>& in = trace.activations[l];
      for (std::size_t j = 0; j < layer.fan_out; ++j) {
        for (std::size_t i = 0; i < layer.fan_in; ++i) g.weights[j * layer.fan_in + i] += delta[j] * in[i];
        g.biases[j] += delta[j];
      }
      if (l == 0) break;
      std::vector<double> prev(layer.fan_in, 0.0);
      for (std::size_t i = 0; i < layer.fan_in; ++i) {
        if (in[i] <= 0.0) continue;  // ReLU derivative, 0 at the kink
        for (std::size_t j = 0; j < layer.fan_out; ++j) prev[i] += layer.weights[j * layer.fan_in + i] * delta[j];
      }
      delta = std::move(prev);
    }
  }
  return {grad.flatten(), total / n};
}

}  // namespace reference

}  // namespace fwdeep::mlp
