#include "wlingam/bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "wlingam/error.hpp"
#include "wlingam/rng.hpp"

namespace wlingam {

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile probability out of [0,1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval percentile_interval(std::span<const double> draws, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "ci level must lie in (0,1)");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = (1.0 - level) / 2.0;
  return {quantile_sorted(sorted, tail), quantile_sorted(sorted, 1.0 - tail)};
}

void summarize_draws(QuerySummary& q, double ci_level) {
  const Interval ci = percentile_interval(q.draws, ci_level);
  q.ci_low = ci.low;
  q.ci_high = ci.high;
  q.includes_zero = q.ci_low <= 0.0 && 0.0 <= q.ci_high;
}

namespace {

std::vector<std::size_t> resolve(const StackedSystem& sys, const std::vector<EffectQuery>& queries,
                                 std::vector<std::size_t>& targets) {
  std::vector<std::size_t> sources;
  targets.clear();
  for (const auto& q : queries) {
    sources.push_back(sys.index(q.source));
    targets.push_back(sys.index(q.target));
  }
  return sources;
}

// Evaluates every query, reusing one effect column per distinct source.
std::vector<double> evaluate(const StackedSystem& sys, const std::vector<EffectQuery>& queries) {
  std::vector<std::size_t> targets;
  const auto sources = resolve(sys, queries, targets);
  std::vector<double> out(queries.size());
  std::optional<std::size_t> cached_source;
  Eigen::VectorXd column;
  for (std::size_t k = 0; k < queries.size(); ++k) {
    if (!cached_source || *cached_source != sources[k]) {
      column = sys.effects_from(sources[k]);
      cached_source = sources[k];
    }
    out[k] = column(static_cast<Eigen::Index>(targets[k]));
  }
  return out;
}

bool is_degenerate(ErrorCode code) {
  return code == ErrorCode::RankDeficient || code == ErrorCode::ZeroVariance || code == ErrorCode::MaskInfeasible;
}

}  // namespace

BootstrapSummary run_bootstrap(const Panel& panel, const PKMask& mask, const BootstrapConfig& config,
                               const std::vector<EffectQuery>& queries) {
  FitOptions options;
  options.auxiliary = config.include_auxiliary;
  return run_bootstrap(panel, mask, config, queries, fit(panel, mask, options));
}

BootstrapSummary run_bootstrap(const Panel& panel, const PKMask& mask, const BootstrapConfig& config,
                               const std::vector<EffectQuery>& queries, const LongitudinalModel& full_fit) {
  if (config.B < 1) throw Error(ErrorCode::InvalidArgument, "B must be at least 1");
  if (config.workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be at least 1");
  if (!(config.ci_level > 0.0 && config.ci_level < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "ci level must lie in (0,1)");
  }
  if (queries.empty()) throw Error(ErrorCode::InvalidArgument, "no effect queries");

  BootstrapSummary summary;
  summary.config = config;
  if (config.B < 200) {
    summary.warnings.push_back("B=" + std::to_string(config.B) + " is small for percentile intervals");
  }

  const std::vector<double> point =
      evaluate(StackedSystem::build(full_fit, config.include_auxiliary), queries);

  const std::size_t n = panel.subjects();
  const std::size_t B = config.B;
  std::vector<std::vector<double>> draws(B);
  std::vector<char> degenerate(B, 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  FitOptions options;
  options.auxiliary = config.include_auxiliary;
  options.provenance = false;

  auto worker = [&] {
    std::vector<std::size_t> rows(n);
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= B) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      try {
        Philox rng(config.seed, b);
        for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
        const Panel replicate = panel.resample(rows);
        const LongitudinalModel m = fit(replicate, mask, options);
        std::vector<double> values = evaluate(StackedSystem::build(m, config.include_auxiliary), queries);
        if (std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); })) {
          draws[b] = std::move(values);
        } else {
          degenerate[b] = 1;
        }
      } catch (const Error& e) {
        if (is_degenerate(e.code())) {
          degenerate[b] = 1;
        } else {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::min(config.workers, B);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t b = 0; b < B; ++b) {
    if (degenerate[b]) summary.excluded_replicates.push_back(b);
  }
  if (summary.excluded_replicates.size() == B) {
    throw Error(ErrorCode::AllReplicatesDegenerate, "all " + std::to_string(B) + " bootstrap replicates degenerated");
  }

  summary.queries.resize(queries.size());
  for (std::size_t k = 0; k < queries.size(); ++k) {
    QuerySummary& q = summary.queries[k];
    q.query = queries[k];
    q.point = point[k];
    q.draws.reserve(B - summary.excluded_replicates.size());
    for (std::size_t b = 0; b < B; ++b) {
      if (!degenerate[b]) q.draws.push_back(draws[b][k]);
    }
    summarize_draws(q, config.ci_level);
  }
  return summary;
}

Histogram histogram(std::span<const double> draws, std::size_t bins, double ci_low, double ci_high) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  if (draws.empty()) throw Error(ErrorCode::InvalidArgument, "histogram of no draws");
  Histogram h;
  const auto [lo, hi] = std::minmax_element(draws.begin(), draws.end());
  h.min = *lo;
  h.max = *hi;
  h.width = (h.max - h.min) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (double x : draws) {
    std::size_t k = 0;
    if (h.width > 0.0) {
      k = static_cast<std::size_t>(std::floor((x - h.min) / h.width));
      k = std::min(k, bins - 1);
    }
    ++h.counts[k];
  }
  h.ci_low = ci_low;
  h.ci_high = ci_high;
  h.zero_in_range = h.min <= 0.0 && 0.0 <= h.max;
  return h;
}

std::vector<Histogram> histogram_export(const BootstrapSummary& summary, std::size_t bins) {
  std::vector<Histogram> out;
  out.reserve(summary.queries.size());
  for (const auto& q : summary.queries) out.push_back(histogram(q.draws, bins, q.ci_low, q.ci_high));
  return out;
}

}  // namespace wlingam
