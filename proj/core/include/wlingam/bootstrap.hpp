#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wlingam/effects.hpp"
#include "wlingam/fit.hpp"
#include "wlingam/mask.hpp"
#include "wlingam/panel.hpp"

namespace wlingam {

struct BootstrapConfig {
  std::size_t B = 1000;
  std::uint64_t seed = 0;
  double ci_level = 0.95;
  std::size_t workers = 1;
  bool include_auxiliary = false;
};

struct EffectQuery {
  Node source;
  Node target;

  bool operator==(const EffectQuery&) const = default;
};

struct QuerySummary {
  EffectQuery query;
  double point = 0.0;
  std::vector<double> draws;  // retained replicates, in replicate order
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool includes_zero = true;
};

struct BootstrapSummary {
  BootstrapConfig config;
  std::vector<QuerySummary> queries;
  std::vector<std::size_t> excluded_replicates;
  std::vector<std::string> warnings;
};

/// Type-7 quantile (linear interpolation between order statistics) of an
/// ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double prob);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Equal-tailed percentile interval at `level`.
Interval percentile_interval(std::span<const double> draws, double level);

/// Subject-level bootstrap over the whole pipeline. Replicate b draws its
/// subject indices from Philox(seed, b), so the draws do not depend on the
/// worker count. Replicates whose refit fails with a numerical degeneracy
/// are excluded and listed. Throws Error(AllReplicatesDegenerate).
BootstrapSummary run_bootstrap(const Panel& panel, const PKMask& mask, const BootstrapConfig& config,
                               const std::vector<EffectQuery>& queries);

/// Same as run_bootstrap, reusing an already fitted full-sample model.
BootstrapSummary run_bootstrap(const Panel& panel, const PKMask& mask, const BootstrapConfig& config,
                               const std::vector<EffectQuery>& queries, const LongitudinalModel& full_fit);

/// Recomputes intervals from stored draws (e.g. loaded from disk).
void summarize_draws(QuerySummary& q, double ci_level);

struct Histogram {
  double min = 0.0;
  double max = 0.0;
  double width = 0.0;
  std::vector<std::size_t> counts;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool zero_in_range = false;
};

/// Equal-width bins over [min, max] of the draws; markers copied from the
/// summary. Throws Error(InvalidArgument) for bins < 1 or empty draws.
Histogram histogram(std::span<const double> draws, std::size_t bins, double ci_low, double ci_high);
std::vector<Histogram> histogram_export(const BootstrapSummary& summary, std::size_t bins);

}  // namespace wlingam
