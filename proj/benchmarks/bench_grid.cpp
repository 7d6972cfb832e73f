#include <benchmark/benchmark.h>

#include "tentomo/normalops.hpp"

using namespace tentomo;

namespace {

GridTensorField grid(int m, int N) {
  SplitMix64 rng(23);
  return sample_field(random_field(2, m, Rational(1), 6, 2, rng), N, 4.0);
}

}  // namespace

static void SolenoidalDecompose(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto f = grid(2, N);
  for (auto _ : state) benchmark::DoNotOptimize(solenoidal_decompose(f));
  state.SetComplexityN(static_cast<std::int64_t>(N) * N);
}
BENCHMARK(SolenoidalDecompose)->RangeMultiplier(2)->Range(32, 256)->Complexity(benchmark::oNLogN)
    ->Unit(benchmark::kMillisecond);

static void NormalConvolution(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto f = grid(1, N);
  for (auto _ : state) benchmark::DoNotOptimize(normal_convolution(f, static_cast<int>(state.range(1))));
  state.SetComplexityN(static_cast<std::int64_t>(N) * N);
}
BENCHMARK(NormalConvolution)->ArgsProduct({{32, 64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

static void NormalAngularOnGrid(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  SplitMix64 rng(23);
  const auto f = random_field(2, 1, Rational(1), 6, 2, rng);
  const auto rule = build_rule(2, 60);
  for (auto _ : state) benchmark::DoNotOptimize(normal_momentum_on_grid(f, N, 4.0, 0, rule));
}
BENCHMARK(NormalAngularOnGrid)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
