// OpenMP builders against the serial reference loops.

#include <benchmark/benchmark.h>

#include "acts/gp.hpp"
#include "acts/kernel.hpp"
#include "acts/sobol.hpp"

namespace {

using namespace acts;

constexpr Eigen::Index kDim = 60;

KernelParams params() { return KernelParams::isotropic(kDim, 2.0, 1e-3); }

void BM_CrossGram(benchmark::State& state) {
  const Matrix a = uniform_points(state.range(0), kDim, 1), b = uniform_points(state.range(1), kDim, 2);
  const KernelParams p = params();
  for (auto _ : state) benchmark::DoNotOptimize(cross_gram(a, b, p));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_CrossGramReference(benchmark::State& state) {
  const Matrix a = uniform_points(state.range(0), kDim, 1), b = uniform_points(state.range(1), kDim, 2);
  const KernelParams p = params();
  for (auto _ : state) benchmark::DoNotOptimize(reference::cross_gram(a, b, p));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_GradientCross(benchmark::State& state) {
  const Matrix a = uniform_points(state.range(0), kDim, 1);
  const Vector x0 = Vector::Constant(kDim, 0.5);
  const KernelParams p = params();
  for (auto _ : state) benchmark::DoNotOptimize(gradient_cross(a, x0, p));
}

void BM_GradientCrossReference(benchmark::State& state) {
  const Matrix a = uniform_points(state.range(0), kDim, 1);
  const Vector x0 = Vector::Constant(kDim, 0.5);
  const KernelParams p = params();
  for (auto _ : state) benchmark::DoNotOptimize(reference::gradient_cross(a, x0, p));
}

Dataset dataset(Eigen::Index n) {
  const Matrix x = uniform_points(n, kDim, 3);
  return Dataset::make(x, x.rowwise().sum().array().sin().matrix());
}

void BM_LmlGradient(benchmark::State& state) {
  const Dataset ds = dataset(state.range(0));
  const KernelParams p = params();
  for (auto _ : state) benchmark::DoNotOptimize(log_marginal_likelihood(ds, p));
}

void BM_LmlGradientReference(benchmark::State& state) {
  const Dataset ds = dataset(state.range(0));
  const KernelParams p = params();
  for (auto _ : state) benchmark::DoNotOptimize(reference::log_marginal_likelihood(ds, p));
}

}  // namespace

BENCHMARK(BM_CrossGram)->Args({300, 2000})->Args({300, 10000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossGramReference)->Args({300, 2000})->Args({300, 10000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientCross)->Arg(300)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GradientCrossReference)->Arg(300)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LmlGradient)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LmlGradientReference)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
