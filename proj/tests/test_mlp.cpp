#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>
#include <omp.h>

#include "fwdeep/errors.hpp"
#include "fwdeep/mlp.hpp"
#include "fwdeep/rng.hpp"

using namespace fwdeep;
using namespace fwdeep::mlp;

namespace {

// Forward pass written directly against the documented flat layout.
double layout_forward(const ParamVector& w, Point p) {
  std::vector<double> a{p.x1, p.x2};
  std::size_t off = 0;
  const std::size_t dims[] = {2, 25, 25, 25, 1};
  for (int l = 0; l < 4; ++l) {
    const std::size_t in = dims[l], out = dims[l + 1];
    std::vector<double> z(out);
    for (std::size_t j = 0; j < out; ++j) {
      double s = w[off + in * out + j];
      for (std::size_t i = 0; i < in; ++i) s += w[off + j * in + i] * a[i];
      z[j] = l == 3 ? std::tanh(s) : std::max(0.0, s);
    }
    off += in * out + out;
    a = std::move(z);
  }
  return a[0];
}

ParamVector random_params(Rng& rng, double scale) {
  std::vector<double> v(kParamCount);
  for (double& e : v) e = rng.uniform_symmetric(scale);
  return ParamVector(std::move(v));
}

std::vector<Sample> random_batch(Rng& rng, std::size_t n) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Point p{rng.uniform01(), rng.uniform01()};
    out.push_back({p, circle_label(p)});
  }
  return out;
}

double max_abs_diff(const ParamVector& a, const ParamVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Layout, Dimensions) {
  EXPECT_EQ(kParamCount, 1401u);
  EXPECT_EQ(kLayers[0].weight_offset, 0u);
  EXPECT_EQ(kLayers[0].bias_offset, 50u);
  EXPECT_EQ(kLayers[1].weight_offset, 75u);
  EXPECT_EQ(kLayers[3].bias_offset, 1400u);
  std::size_t biases = 0;
  for (std::size_t i = 0; i < kParamCount; ++i) biases += is_bias_index(i);
  EXPECT_EQ(biases, 76u);
}

TEST(Layout, FlattenRoundTripIsExact) {
  Rng rng(1);
  for (int c = 0; c < 10; ++c) {
    const ParamVector w = random_params(rng, 3.0);
    EXPECT_EQ(MlpModel::unflatten(w).flatten(), w);
  }
  EXPECT_THROW(MlpModel::unflatten(ParamVector(10)), InvalidInput);
}

TEST(Forward, ZeroParamsGiveZero) {
  EXPECT_EQ(forward(ParamVector(kParamCount), {0.3, 0.7}), 0.0);
}

TEST(Forward, MatchesLayoutOracleAndReference) {
  Rng rng(2);
  for (int c = 0; c < 20; ++c) {
    const ParamVector w = random_params(rng, 0.6);
    const MlpModel m = MlpModel::unflatten(w);
    for (int k = 0; k < 10; ++k) {
      const Point p{rng.uniform01(), rng.uniform01()};
      const double y = forward(w, p);
      ASSERT_NEAR(y, layout_forward(w, p), 1e-14);
      ASSERT_NEAR(y, reference::forward(m, p), 1e-14);
      ASSERT_GT(y, -1.0);
      ASSERT_LT(y, 1.0);
    }
  }
}

TEST(Forward, GoldenValue) {
  const ParamVector w = init_params(42, L1Ball(10.0));
  EXPECT_NEAR(forward(w, {0.3, 0.4}), 0.012700096891001727, 1e-15);
}

TEST(Init, FeasibleDeterministicSeeded) {
  for (std::uint64_t seed : {1, 7, 42, 1234}) {
    const ParamVector w = init_params(seed, L1Ball(10.0));
    EXPECT_LE(w.l1_norm(), 9.9);
    EXPECT_GT(w.l1_norm(), 0.0);
    EXPECT_EQ(w, init_params(seed, L1Ball(10.0)));
  }
  EXPECT_NE(init_params(1, L1Ball(10.0)), init_params(2, L1Ball(10.0)));
  EXPECT_LE(init_params(3, L1Ball(0.5)).l1_norm(), 0.495);
}

TEST(Init, SubnetworkWidth) {
  const MlpModel m = MlpModel::unflatten(init_params(5, L1Ball(1e6), true, 4));
  for (std::size_t l = 0; l + 1 < kLayerCount; ++l) {
    std::size_t live = 0;
    for (std::size_t j = 0; j < m.layers[l].fan_out; ++j) {
      bool any = m.layers[l].biases[j] != 0.0;
      for (std::size_t i = 0; i < m.layers[l].fan_in; ++i) any |= m.layers[l].weights[j * m.layers[l].fan_in + i] != 0.0;
      live += any;
    }
    EXPECT_EQ(live, 4u) << "layer " << l;
  }
}

TEST(Init, DenseAndBiasFree) {
  const ParamVector dense = init_dense(3);
  const double a1 = std::sqrt(6.0 / 27.0);
  for (std::size_t i = 0; i < kLayers[0].bias_offset; ++i) ASSERT_LT(std::abs(dense[i]), a1);
  const ParamVector nb = init_params(3, L1Ball(10.0), false);
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (is_bias_index(i)) ASSERT_EQ(nb[i], 0.0);
  }
}

TEST(Loss, SingleSampleZeroParams) {
  const std::vector<Sample> b{{{0.1, 0.1}, 1}};
  const BatchGradient g = batch_loss_and_grad(ParamVector(kParamCount), b);
  EXPECT_EQ(g.loss, 1.0);
}

TEST(Loss, PerfectFitIsZero) {
  // Output bias drives tanh to 1 exactly in double precision; every label is +1.
  std::vector<double> v(kParamCount, 0.0);
  v[kParamCount - 1] = 40.0;
  const std::vector<Sample> b{{{0.1, 0.1}, 1}, {{0.5, 0.2}, 1}};
  const BatchGradient g = batch_loss_and_grad(ParamVector(v), b);
  EXPECT_EQ(g.loss, 0.0);
  EXPECT_EQ(g.grad.l1_norm(), 0.0);
}

TEST(Loss, RejectsEmptyBatch) {
  EXPECT_THROW(batch_loss_and_grad(ParamVector(kParamCount), std::span<const Sample>{}), InvalidInput);
  EXPECT_THROW(batch_loss(ParamVector(kParamCount), std::span<const Sample>{}), InvalidInput);
}

TEST(Loss, KernelMatchesReference) {
  Rng rng(4);
  for (std::size_t n : {1, 7, 63, 64, 65, 200, 1000}) {
    const ParamVector w = random_params(rng, 0.5);
    const auto batch = random_batch(rng, n);
    const BatchGradient fast = batch_loss_and_grad(w, batch);
    const BatchGradient ref = reference::loss_and_grad(w, batch);
    EXPECT_NEAR(fast.loss, ref.loss, 1e-12) << n;
    EXPECT_LT(max_abs_diff(fast.grad, ref.grad), 1e-12) << n;
    EXPECT_NEAR(batch_loss(w, batch), ref.loss, 1e-12) << n;
    EXPECT_EQ(batch_loss(w, batch), fast.loss) << n;
    EXPECT_NEAR(reference::loss(w, batch), ref.loss, 1e-15);
    const auto out = predict(w, batch);
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(out[i], forward(w, batch[i].x), 1e-15);
  }
}

TEST(Loss, BoundedAndPermutationInvariant) {
  Rng rng(6);
  const ParamVector w = random_params(rng, 1.0);
  auto batch = random_batch(rng, 300);
  const double l = batch_loss(w, batch);
  EXPECT_GE(l, 0.0);
  EXPECT_LE(l, 4.0);
  std::reverse(batch.begin(), batch.end());
  EXPECT_NEAR(batch_loss(w, batch), l, 1e-12);
}

TEST(Loss, ThreadCountDoesNotChangeResult) {
  Rng rng(8);
  const ParamVector w = random_params(rng, 0.5);
  const auto batch = random_batch(rng, 1000);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const BatchGradient one = batch_loss_and_grad(w, batch);
  omp_set_num_threads(4);
  const BatchGradient four = batch_loss_and_grad(w, batch);
  omp_set_num_threads(saved);
  EXPECT_EQ(one.loss, four.loss);
  EXPECT_EQ(one.grad, four.grad);
}

TEST(Gradient, CentralDifferences) {
  Rng rng(10);
  for (int c = 0; c < 20; ++c) {
    const ParamVector w = random_params(rng, 0.5);
    const auto batch = random_batch(rng, 8);
    const ParamVector g = batch_loss_and_grad(w, batch).grad;
    std::vector<double> v(w.values().begin(), w.values().end());
    for (int k = 0; k < 50; ++k) {
      const std::size_t i = rng.uniform_index(kParamCount);
      const double h = 1e-6 * std::max(1.0, std::abs(v[i]));
      const double keep = v[i];
      v[i] = keep + h;
      const double up = reference::loss(ParamVector(v), batch);
      v[i] = keep - h;
      const double dn = reference::loss(ParamVector(v), batch);
      v[i] = keep;
      const double fd = (up - dn) / (2 * h);
      const double err = std::abs(fd - g[i]) / std::max({std::abs(fd), std::abs(g[i]), 1e-6});
      ASSERT_LT(err, 1e-4) << "pair " << c << " coord " << i << " fd " << fd << " grad " << g[i];
    }
  }
}

TEST(Penalty, Contract) {
  Rng rng(12);
  const auto batch = random_batch(rng, 30);
  const ParamVector w = random_params(rng, 0.3);
  const BatchGradient plain = batch_loss_and_grad(w, batch);
  const BatchGradient zero = penalized_loss_and_grad(w, batch, 0.0);
  EXPECT_EQ(zero.loss, plain.loss);
  EXPECT_EQ(zero.grad, plain.grad);

  EXPECT_EQ(penalized_loss_and_grad(ParamVector(kParamCount), batch, 0.1).loss,
            batch_loss(ParamVector(kParamCount), batch));

  std::vector<double> v(w.values().begin(), w.values().end());
  const double scale = 10.0 / w.l1_norm();
  for (double& e : v) e *= scale;
  v[3] = 0.0;
  const ParamVector w10(v);
  const BatchGradient pen = penalized_loss_and_grad(w10, batch, 0.1);
  const BatchGradient base = batch_loss_and_grad(w10, batch);
  EXPECT_NEAR(pen.loss - base.loss, 0.1 * w10.l1_norm(), 1e-12);
  EXPECT_EQ(pen.grad[3], base.grad[3]);
  for (std::size_t i : {0, 100, 1400}) {
    if (w10[i] != 0.0) EXPECT_NEAR(pen.grad[i] - base.grad[i], w10[i] > 0 ? 0.1 : -0.1, 1e-15);
  }
  EXPECT_THROW(penalized_loss_and_grad(w, batch, -1.0), InvalidInput);
}

TEST(Objective, BiasFreeGradient) {
  Rng rng(14);
  const auto batch = random_batch(rng, 20);
  const ParamVector w = random_params(rng, 0.4);
  const MlpObjective with(batch), without(batch, 0.0, false);
  const ParamVector g1 = with.gradient(w), g0 = without.gradient(w);
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (is_bias_index(i)) ASSERT_EQ(g0[i], 0.0);
    else ASSERT_EQ(g0[i], g1[i]);
  }
  EXPECT_EQ(with.value(w), batch_loss(w, batch));
  EXPECT_EQ(with.value_and_gradient(w).gradient, g1);
}
