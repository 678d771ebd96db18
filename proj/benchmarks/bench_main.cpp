#include <benchmark/benchmark.h>

#include "powergain/estimator.hpp"
#include "powergain/pipeline.hpp"
#include "powergain/pubbias.hpp"
#include "powergain/simulate.hpp"
#include "powergain/spectrum.hpp"

using namespace powergain;

namespace {

TScoreSample bimodal(std::size_t n) {
  sim::DgpSpec spec;
  spec.prior = sim::Prior::Bimodal;
  return sim::draw_population(spec, n, 7);
}

void BM_Kernel(benchmark::State& state) {
  TuningConfig cfg;
  const SpectralBasis basis(cfg, static_cast<int>(state.range(0)));
  double t = -4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel_S(t, basis));
    t = t > 4.0 ? -4.0 : t + 0.013;
  }
}
BENCHMARK(BM_Kernel)->Arg(12)->Arg(17)->Arg(40);

void BM_DeltaHatPb(benchmark::State& state) {
  const auto s = bimodal(static_cast<std::size_t>(state.range(0)));
  TuningConfig cfg;
  cfg.n_effective = s.size();
  const Tuning tn = select_tuning(cfg);
  const SpectralBasis basis(cfg, tn.J);
  for (auto _ : state) benchmark::DoNotOptimize(delta_hat_pb(s.t, basis, tn.epsilon).delta);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DeltaHatPb)->Arg(500)->Arg(10'000)->Arg(100'000);

void BM_Pipeline(benchmark::State& state) {
  const auto s = bimodal(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_power_gain(s, TuningConfig{}).std_error);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Pipeline)->Arg(500)->Arg(10'000)->Arg(100'000);

void BM_DrawPopulation(benchmark::State& state) {
  sim::DgpSpec spec;
  spec.prior = sim::Prior::Bimodal;
  spec.noise = static_cast<sim::Noise>(state.range(1));
  auto rng = sim::make_stream(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sim::draw_population(spec, static_cast<std::size_t>(state.range(0)), rng).t.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DrawPopulation)->Args({500, 0})->Args({500, 1})->Args({500, 2});

}  // namespace
BENCHMARK_MAIN();
