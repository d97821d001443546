#include <benchmark/benchmark.h>

#include <random>

#include "suffreduce/estimators.hpp"
#include "suffreduce/linkage.hpp"
#include "suffreduce/verify.hpp"

using namespace suffreduce;

namespace {

struct Planted {
  SymMatrix x;
  double lambda;
};

Planted planted(std::size_t p, std::size_t blocks) {
  std::mt19937_64 rng(7);
  InstanceOptions io;
  io.p = p;
  io.blocks = blocks;
  SymMatrix x = random_covariance(rng, io);
  std::vector<std::size_t> labels(p);
  for (std::size_t j = 0; j < p; ++j) labels[j] = j * blocks / p;
  const Partition part = Partition::from_labels(labels);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (!part.same_block(i, j)) x(i, j) *= 0.1;
  return {x, separating_lambda(x, part)};
}

SymMatrix noise(std::size_t p) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  SymMatrix x(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) x(i, j) = g(rng);
  return x;
}

} // namespace

static void BM_GlassoDirect(benchmark::State& state) {
  const auto inst = planted(state.range(0), 10);
  const auto spec = EstimatorSpec::graphical_lasso(inst.lambda);
  for (auto _ : state) benchmark::DoNotOptimize(solve(spec, inst.x));
}

static void BM_GlassoDecomposed(benchmark::State& state) {
  const auto inst = planted(state.range(0), 10);
  const auto spec = EstimatorSpec::graphical_lasso(inst.lambda);
  for (auto _ : state) benchmark::DoNotOptimize(solve_decomposed(spec, inst.x, 1));
}

static void BM_Kruskal(benchmark::State& state) {
  const SymMatrix x = noise(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mst_kruskal(x));
  state.SetComplexityN(state.range(0));
}

static void BM_ThresholdComponents(benchmark::State& state) {
  const SymMatrix x = noise(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(threshold_components(x, 2.0));
  state.SetComplexityN(state.range(0));
}

static void BM_EighTridiagonal(benchmark::State& state) {
  const SymMatrix x = noise(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eigh(x, EigenMethod::Tridiagonal));
}

static void BM_EighJacobi(benchmark::State& state) {
  const SymMatrix x = noise(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eigh(x, EigenMethod::Jacobi));
}

BENCHMARK(BM_GlassoDirect)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GlassoDecomposed)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Kruskal)->RangeMultiplier(2)->Range(32, 256)->Complexity();
BENCHMARK(BM_ThresholdComponents)->RangeMultiplier(2)->Range(32, 256)->Complexity();
BENCHMARK(BM_EighTridiagonal)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EighJacobi)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
