#include <benchmark/benchmark.h>

#include "wlingam/bootstrap.hpp"
#include "wlingam/rng.hpp"
#include "wlingam/simulator.hpp"
#include "wlingam/synth.hpp"

using namespace wlingam;

static void BM_BootstrapSmall(benchmark::State& state) {
  const GeneratorSpec spec = small_spec(500, 1);
  const Panel panel = generate(spec).panel;
  const auto queries = bundle_queries(spec.truth.schema, 1);
  const BootstrapConfig config{.B = 100, .seed = 1, .workers = static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(run_bootstrap(panel, *spec.mask, config, queries));
}
BENCHMARK(BM_BootstrapSmall)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_BootstrapScreening(benchmark::State& state) {
  const GeneratorSpec spec = paper_shaped_spec(2000, 1);
  const Panel panel = generate(spec).panel;
  const auto queries = bundle_queries(spec.truth.schema, 1);
  const BootstrapConfig config{.B = 20, .seed = 1, .workers = 1};
  for (auto _ : state) benchmark::DoNotOptimize(run_bootstrap(panel, *spec.mask, config, queries));
}
BENCHMARK(BM_BootstrapScreening)->Unit(benchmark::kMillisecond);

static void BM_Quantile(benchmark::State& state) {
  Philox rng(2, 0);
  std::vector<double> draws(static_cast<std::size_t>(state.range(0)));
  for (double& d : draws) d = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(percentile_interval(draws, 0.95));
}
BENCHMARK(BM_Quantile)->Arg(1000)->Arg(100000);
