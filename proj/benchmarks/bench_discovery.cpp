#include <benchmark/benchmark.h>

#include "wlingam/discovery.hpp"
#include "wlingam/fit.hpp"
#include "wlingam/rng.hpp"
#include "wlingam/synth.hpp"

using namespace wlingam;

namespace {

Eigen::MatrixXd laplace_chain(Eigen::Index n, Eigen::Index p) {
  Philox rng(1, 0);
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = rng.laplace(1.0) + (j > 0 ? 0.6 * X(i, j - 1) : 0.0);
  }
  return X;
}

}  // namespace

static void BM_Entropy(benchmark::State& state) {
  const Eigen::VectorXd u = standardize(laplace_chain(state.range(0), 1).col(0));
  for (auto _ : state) benchmark::DoNotOptimize(nongaussianity_entropy(u));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Entropy)->Arg(1000)->Arg(20000);

static void BM_FitWithinTime(benchmark::State& state) {
  const Eigen::Index p = state.range(1);
  const Eigen::MatrixXd X = laplace_chain(state.range(0), p);
  IntMatrix mask = IntMatrix::Constant(p, p, mark::kUnknown);
  mask.diagonal().setZero();
  for (auto _ : state) benchmark::DoNotOptimize(fit_within_time(X, mask));
}
BENCHMARK(BM_FitWithinTime)->Args({20000, 5})->Args({20000, 10})->Unit(benchmark::kMillisecond);

static void BM_FitScreeningPanel(benchmark::State& state) {
  const GeneratorSpec spec = paper_shaped_spec(static_cast<std::size_t>(state.range(0)), 3);
  const Panel panel = generate(spec).panel;
  const FitOptions options{.provenance = false};
  for (auto _ : state) benchmark::DoNotOptimize(fit(panel, *spec.mask, options));
}
BENCHMARK(BM_FitScreeningPanel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
