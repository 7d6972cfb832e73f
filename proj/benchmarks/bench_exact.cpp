#include <benchmark/benchmark.h>

#include "tentomo/polyfield.hpp"
#include "tentomo/spherequad.hpp"

using namespace tentomo;

static void OperatorR(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  SplitMix64 rng(5);
  const auto f = random_field(n, m, Rational(1), m + 1, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(operator_R(f));
}
BENCHMARK(OperatorR)->ArgsProduct({{2, 3}, {1, 2, 3}})->Unit(benchmark::kMillisecond);

static void SaintVenantRoundTrip(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  SplitMix64 rng(6);
  const auto f = random_field(3, m, Rational(1), m + 1, 1, rng);
  const auto wf = saint_venant_W(f);
  for (auto _ : state) benchmark::DoNotOptimize(r_to_w(w_to_r(wf, m), m));
}
BENCHMARK(SaintVenantRoundTrip)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void IbpIdentity(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  QPoly p(3);
  for (int i = 0; i < 3; ++i) p += QPoly::variable(3, i).pow(s + 1) * Rational(i + 1, 3);
  const HomogeneousRational g(p, s + 1, 1);
  std::vector<int> idx(static_cast<std::size_t>(s));
  for (int t = 0; t < s; ++t) idx[static_cast<std::size_t>(t)] = t % 3;
  for (auto _ : state) benchmark::DoNotOptimize(verify_ibp(g, idx));
}
BENCHMARK(IbpIdentity)->DenseRange(1, 4);

static void MonomialSphereIntegral(benchmark::State& state) {
  const std::vector<int> e{4, 2, 6};
  for (auto _ : state) benchmark::DoNotOptimize(monomial_sphere_integral(3, e));
}
BENCHMARK(MonomialSphereIntegral);

BENCHMARK_MAIN();
