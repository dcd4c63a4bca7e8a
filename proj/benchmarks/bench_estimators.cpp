// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <vector>

#include "doppler/doppler.hpp"

using namespace doppler;

namespace {

ScenarioConfig scenario(int N) {
  ScenarioSpec s;
  s.N = N;
  s.f_D = 1000.0;
  return make_scenario(s);
}

}  // namespace

static void Moments(benchmark::State& state) {
  const ScenarioConfig c = scenario(static_cast<int>(state.range(0)));
  const Simulation sim = simulate(c, Rng(1));
  // Fixed lag count, so the cost is linear in N.
  const LagGrid grid{5, 2000, 10};
  for (auto _ : state) benchmark::DoNotOptimize(estimate_moments(sim.received.antenna_copy(0), grid));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(Moments)->RangeMultiplier(4)->Range(1 << 12, 1 << 18)->Complexity(benchmark::oN);

static void MbeEqual(benchmark::State& state) {
  const ScenarioConfig c = scenario(static_cast<int>(state.range(0)));
  const Simulation sim = simulate(c, Rng(2));
  // Default grid: U_max = N/10 lags, so the moment pass is quadratic in N.
  const LagGrid grid = LagGrid::standard(c.L, c.N);
  const SearchSpec search;
  MimoOptions opt;
  opt.combining = Combining::Equal;
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(estimate_mimo(sim.received, c, grid, search, opt, rng));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(MbeEqual)->RangeMultiplier(2)->Range(1 << 12, 1 << 16)->Complexity(benchmark::oNSquared)->Unit(benchmark::kMillisecond);

static void MbeOptimal(benchmark::State& state) {
  const ScenarioConfig c = scenario(10000);
  const Simulation sim = simulate(c, Rng(4));
  const LagGrid grid = LagGrid::standard(c.L, c.N);
  const SearchSpec search;
  MimoOptions opt;
  opt.combining = Combining::Optimal;
  opt.n_b = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Rng rng(5);
    benchmark::DoNotOptimize(estimate_mimo(sim.received, c, grid, search, opt, rng));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(MbeOptimal)->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oN)->Unit(benchmark::kMillisecond);

static void CirculantFading(benchmark::State& state) {
  const ScenarioConfig c = scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(generate_fading(c, Rng(6), FadingMethod::CirculantEmbedding));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(CirculantFading)->RangeMultiplier(4)->Range(1 << 12, 1 << 18)->Complexity(benchmark::oNLogN)->Unit(benchmark::kMillisecond);

static void LogPdfDa(benchmark::State& state) {
  ScenarioSpec s;
  s.N = static_cast<int>(state.range(0));
  s.n_t = 1;
  s.n_r = 1;
  s.L = 1;
  s.f_D = 100.0;
  s.constellation = "64QAM";
  const ScenarioConfig c = make_scenario(s);
  const Simulation sim = simulate(c, Rng(7));
  const StackedObservation obs = StackedObservation::from(sim.received);
  const ModelParams p = ModelParams::from(c);
  for (auto _ : state) {
    const CovarianceModel cov = build_cov_da(sim.symbols, p, c.N);
    benchmark::DoNotOptimize(evaluate_da(obs, cov));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(LogPdfDa)->RangeMultiplier(2)->Range(25, 400)->Complexity(benchmark::oNCubed)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
