#include <benchmark/benchmark.h>

#include "wlingam/effects.hpp"
#include "wlingam/synth.hpp"

using namespace wlingam;

static void BM_BuildStacked(benchmark::State& state) {
  const LongitudinalModel truth = paper_shaped_spec(10, 0).truth;
  for (auto _ : state) benchmark::DoNotOptimize(StackedSystem::build(truth));
}
BENCHMARK(BM_BuildStacked);

static void BM_EffectsFromSource(benchmark::State& state) {
  const auto sys = StackedSystem::build(paper_shaped_spec(10, 0).truth);
  for (auto _ : state) {
    for (std::size_t s = 0; s < sys.size(); ++s) benchmark::DoNotOptimize(sys.effects_from(s));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sys.size()));
}
BENCHMARK(BM_EffectsFromSource);

static void BM_DenseInverse(benchmark::State& state) {
  const auto sys = StackedSystem::build(paper_shaped_spec(10, 0).truth);
  const auto n = static_cast<Eigen::Index>(sys.size());
  for (auto _ : state) {
    Eigen::MatrixXd inv = (Eigen::MatrixXd::Identity(n, n) - sys.matrix()).inverse();
    benchmark::DoNotOptimize(inv.data());
  }
}
BENCHMARK(BM_DenseInverse);

static void BM_PathOracle(benchmark::State& state) {
  const auto sys = StackedSystem::build(small_spec(10, 0).truth);
  for (auto _ : state) {
    for (std::size_t s = 0; s < sys.size(); ++s) {
      for (std::size_t t = 0; t < sys.size(); ++t) benchmark::DoNotOptimize(oracle_total_effect(sys, s, t));
    }
  }
}
BENCHMARK(BM_PathOracle);
