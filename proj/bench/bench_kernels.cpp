// Serial reference loops vs the chunked OpenMP kernels, at the shapes the
// training loop and the phase diagram actually use.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "chaosedge/dynamics/heatmap.hpp"
#include "chaosedge/numerics/kernels.hpp"
#include "chaosedge/numerics/quadrature.hpp"
#include "chaosedge/numerics/rng.hpp"
#include "chaosedge/numerics/stats.hpp"

using namespace chaosedge;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return gaussian_matrix(r, c, 0.0, 1.0, rng);
}

// x (B x 784) times W^T (784 x 784): the hidden-layer forward pass.
void BM_ForwardSerial(benchmark::State& state) {
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 784, 1);
  const auto w = random_matrix(784, 784, 2);
  Matrix out;
  for (auto _ : state) {
    kernels::serial::matmul_abt(x, w, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 784 * 784);
}

void BM_ForwardParallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(1)));
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 784, 1);
  const auto w = random_matrix(784, 784, 2);
  Matrix out;
  for (auto _ : state) {
    kernels::matmul_abt(x, w, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 784 * 784);
}

// d_h^T x: the hidden-layer weight gradient.
void BM_GradientSerial(benchmark::State& state) {
  const auto d = random_matrix(static_cast<std::size_t>(state.range(0)), 784, 3);
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 784, 4);
  Matrix out;
  for (auto _ : state) {
    kernels::serial::matmul_atb(d, x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_GradientParallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(1)));
  const auto d = random_matrix(static_cast<std::size_t>(state.range(0)), 784, 3);
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 784, 4);
  Matrix out;
  for (auto _ : state) {
    kernels::matmul_atb(d, x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_MatvecSerial(benchmark::State& state) {
  const auto w = random_matrix(784, 784, 5);
  std::vector<double> x(784, 0.5), y(784);
  for (auto _ : state) {
    kernels::serial::matvec(w, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_MatvecParallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const auto w = random_matrix(784, 784, 5);
  std::vector<double> x(784, 0.5), y(784);
  for (auto _ : state) {
    kernels::matvec(w, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

// A 10 x 10 phase diagram at n = 256.
dynamics::PhaseGrid small_grid() { return {{-2.0, 2.0, 10}, {0.2, 2.0, 10}}; }

void BM_HeatmapSerial(benchmark::State& state) {
  dynamics::HeatmapOptions opts;
  opts.n = 256;
  const auto rule = gaussian_quadrature();
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::phase_heatmap_serial(small_grid(), opts, rule));
}

void BM_HeatmapParallel(benchmark::State& state) {
  dynamics::HeatmapOptions opts;
  opts.n = 256;
  opts.workers = static_cast<int>(state.range(0));
  const auto rule = gaussian_quadrature();
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::phase_heatmap(small_grid(), opts, rule));
}

}  // namespace

BENCHMARK(BM_ForwardSerial)->Arg(32)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardParallel)->Args({32, 1})->Args({32, 2})->Args({1000, 1})->Args({1000, 2})
    ->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GradientSerial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientParallel)->Args({32, 1})->Args({32, 2})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MatvecSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MatvecParallel)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_HeatmapSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HeatmapParallel)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
