#include <benchmark/benchmark.h>

#include "tentomo/normalops.hpp"
#include "tentomo/xray.hpp"

using namespace tentomo;

namespace {

PolyBumpField field(int n, int m, int s) {
  SplitMix64 rng(17);
  return random_field(n, m, Rational(1), s, 2, rng);
}

}  // namespace

static void RayTransform(benchmark::State& state) {
  const auto f = field(2, static_cast<int>(state.range(0)), 4);
  TransformEngine engine(f);
  const Line line{{0.1, -0.2}, {0.6, 0.8}};
  for (auto _ : state) benchmark::DoNotOptimize(engine.momentum(line, 0));
}
BENCHMARK(RayTransform)->DenseRange(0, 3);

static void MomentumDerivative(benchmark::State& state) {
  const auto f = field(3, 2, 6);
  TransformEngine engine(f);
  const Line line{{0.1, -0.2, 0.05}, {0.6, 0.0, 0.8}};
  const std::vector<int> xo{1, 1, 0}, xio{0, 1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(engine.derivative(line, 1, xo, xio));
}
BENCHMARK(MomentumDerivative);

static void JohnRelation(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto f = field(2, m, 2 * m + 2);
  const Line line{{0.1, -0.2}, {0.6, 0.8}};
  for (auto _ : state) benchmark::DoNotOptimize(verify_john_relation(f, line));
}
BENCHMARK(JohnRelation)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);

static void NormalRayAngular(benchmark::State& state) {
  const auto f = field(2, 2, 4);
  const auto rule = build_rule(2, static_cast<int>(state.range(0)));
  const std::vector<double> x{0.2, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(normal_ray(f, x, rule));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(NormalRayAngular)->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oN);

static void PropMrtResidual(benchmark::State& state) {
  const auto f = field(2, 2, 4);
  const auto rule = build_rule(2, 40);
  const std::vector<double> x{0.2, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(verify_prop_mrt(f, x, 1, rule));
}
BENCHMARK(PropMrtResidual)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
