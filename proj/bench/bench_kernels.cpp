// OpenMP kernels against their serial twins.
#include <benchmark/benchmark.h>

#include "wdro/concentration.hpp"
#include "wdro/sim.hpp"
#include "wdro/weights.hpp"

namespace {

wdro::DriftSequenceSpec tail_spec() {
  wdro::DriftSequenceSpec spec;
  spec.family = wdro::DriftFamily::ShiftedBinomial;
  spec.rho = 0.5;
  spec.n = 100;
  spec.T = 64;
  return spec;
}

wdro::SweepConfig sweep_config() {
  wdro::SweepConfig cfg = wdro::SweepConfig::desk();
  cfg.deltas = {0.01};
  cfg.epsilons = {0.0, 5.0, 20.0};
  cfg.rho_over_eps = {0.0, 0.01, 0.1};
  cfg.alphas = {0.0, 0.1, 0.3};
  cfg.simulations = 8;
  cfg.jumps = 50;
  cfg.intersection_grid = 401;
  return cfg;
}

template <bool Parallel>
void BM_MonteCarloTail(benchmark::State& state) {
  const auto spec = tail_spec();
  const auto w = wdro::optimal_weights(wdro::TradeoffInstance(spec.T, 1.0, 8.0)).w;
  const auto trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? wdro::monte_carlo_tail(spec, w, 1.0, 2.0, trials, 1)
                      : wdro::monte_carlo_tail_serial(spec, w, 1.0, 2.0, trials, 1);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

template <bool Parallel>
void BM_ExpostSweep(benchmark::State& state) {
  wdro::DemandModel model;
  model.n = 200;
  model.T = 30;
  const auto cfg = sweep_config();
  for (auto _ : state) {
    auto r = Parallel ? wdro::expost_sweep(model, cfg) : wdro::expost_sweep_serial(model, cfg);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(BM_MonteCarloTail<false>)->Name("monte_carlo_tail/serial")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloTail<true>)->Name("monte_carlo_tail/openmp")->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExpostSweep<false>)->Name("expost_sweep/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExpostSweep<true>)->Name("expost_sweep/openmp")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
