// Blocked OpenMP network kernels against the per-sample serial reference.

#include <vector>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "fwdeep/dataset.hpp"
#include "fwdeep/fw_core.hpp"
#include "fwdeep/mlp.hpp"
#include "fwdeep/trainers.hpp"

using namespace fwdeep;

namespace {

const Dataset& data() {
  static const Dataset d = generate(1000, 42);
  return d;
}

const ParamVector& params() {
  static const ParamVector w = mlp::init_dense(7);
  return w;
}

std::span<const Sample> batch(const benchmark::State& state) {
  return data().samples().first(static_cast<std::size_t>(state.range(0)));
}

void BM_ReferenceLossAndGrad(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mlp::reference::loss_and_grad(params(), batch(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BlockedLossAndGrad(benchmark::State& state) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(mlp::batch_loss_and_grad(params(), batch(state)));
  omp_set_num_threads(saved);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ReferenceLoss(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mlp::reference::loss(params(), batch(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BlockedLoss(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mlp::batch_loss(params(), batch(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DeepLineSearch(benchmark::State& state) {
  const ParamVector w = mlp::init_params(1, L1Ball(10.0));
  const mlp::MlpObjective f(batch(state));
  const LmoVertex s = l1_lmo(f.gradient(w), L1Ball(10.0));
  for (auto _ : state) benchmark::DoNotOptimize(deep_line_search(w, s, batch(state)));
}

void thread_args(benchmark::internal::Benchmark* b) {
  const int max_threads = omp_get_num_procs();
  for (int n : {200, 1000}) {
    for (int t = 1; t <= max_threads; t *= 2) b->Args({n, t});
  }
}

}  // namespace

BENCHMARK(BM_ReferenceLossAndGrad)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BlockedLossAndGrad)->Apply(thread_args)->ArgNames({"n", "threads"})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ReferenceLoss)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BlockedLoss)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DeepLineSearch)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
