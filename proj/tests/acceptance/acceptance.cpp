// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Runs under ctest as the `acceptance` test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "wlingam/app/cli.hpp"
#include "wlingam/bootstrap.hpp"
#include "wlingam/discovery.hpp"
#include "wlingam/effects.hpp"
#include "wlingam/error.hpp"
#include "wlingam/fit.hpp"
#include "wlingam/motif.hpp"
#include "wlingam/serialize.hpp"
#include "wlingam/simulator.hpp"
#include "wlingam/synth.hpp"

using namespace wlingam;
namespace wt = wlingam::testing;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double x, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

// ---------------------------------------------------------------------------

double coefficient_error(const LongitudinalModel& fit, const LongitudinalModel& truth) {
  double worst = 0.0;
  auto upd = [&](const auto& a, const auto& b) {
    if (a.size() > 0) worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
  };
  for (std::size_t t = 1; t < truth.time_points(); ++t) {
    upd(fit.alpha[t], truth.alpha[t]);
    upd(fit.B_within[t], truth.B_within[t]);
    upd(fit.B_cross[t], truth.B_cross[t]);
    upd(fit.C_within[t], truth.C_within[t]);
    upd(fit.C_cross[t], truth.C_cross[t]);
  }
  upd(fit.delta, truth.delta);
  return worst;
}

Verdict structure_recovery() {
  const auto start = std::chrono::steady_clock::now();
  const int seeds = 100;
  int ordering_ok = 0;
  double worst = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const GeneratorSpec spec = paper_shaped_spec(20000, 1000 + static_cast<std::uint64_t>(s));
    const LongitudinalModel m = fit(generate(spec).panel, *spec.mask);
    bool all_times = true;
    for (std::size_t t = 1; t < m.time_points(); ++t) {
      // the true DAG admits several topological orders; any of them is correct
      all_times = all_times && is_permutation_lower_triangular(spec.truth.B_within[t], m.ordering[t]);
    }
    if (all_times) ++ordering_ok;
    worst = std::max(worst, coefficient_error(m, spec.truth));
  }
  const double elapsed = seconds_since(start);
  const double rate = static_cast<double>(ordering_ok) / seeds;
  return {rate >= 0.95 && worst <= 0.05 && elapsed <= 300.0,
          "ordering correct in " + std::to_string(ordering_ok) + "/" + std::to_string(seeds) +
              " seeds, max coefficient error " + fmt(worst) + ", " + fmt(elapsed, 3) + " s"};
}

// ---------------------------------------------------------------------------

Verdict mask_compliance() {
  Philox rng(2024, 0);
  const int trials = 500;
  std::size_t violations = 0, checked = 0;
  int errors = 0;
  for (int k = 0; k < trials; ++k) {
    const PanelSchema schema = wt::make_schema(2 + rng.below(4), 1 + rng.below(4), 2 + rng.below(3), rng.bernoulli(0.5));
    const PKMask mask = wt::random_admissible_mask(schema, rng);
    const Panel panel = wt::random_panel(schema, 150 + rng.below(150), rng);
    LongitudinalModel m = LongitudinalModel::zero(schema);
    try {
      m = fit(panel, mask);
    } catch (const Error&) {
      ++errors;
      continue;
    }
    const auto outcomes = schema.outcomes();
    const auto exogenous = schema.exogenous();
    const std::size_t v = schema.intervention();
    auto check = [&](int mark_value, double coef) {
      if (mark_value != mark::kForbidden) return;
      ++checked;
      if (coef != 0.0) ++violations;
    };
    for (std::size_t t = 1; t < schema.time_points(); ++t) {
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        check(mask.within_at(t, outcomes[i], v), m.alpha[t](r));
        for (std::size_t j = 0; j < outcomes.size(); ++j) {
          const auto c = static_cast<Eigen::Index>(j);
          if (i != j) check(mask.within_at(t, outcomes[i], outcomes[j]), m.B_within[t](r, c));
          check(mask.cross_at(t, 1, outcomes[i], outcomes[j]), m.B_cross[t](r, c));
        }
        for (std::size_t j = 0; j < exogenous.size(); ++j) {
          const auto c = static_cast<Eigen::Index>(j);
          check(mask.within_at(t, outcomes[i], exogenous[j]), m.C_within[t](r, c));
          check(mask.cross_at(t, 1, outcomes[i], exogenous[j]), m.C_cross[t](r, c));
        }
        if (t == 1 && schema.baseline()) check(mask.cross_at(1, 1, outcomes[i], *schema.baseline()), m.delta(r));
      }
    }
  }
  return {violations == 0 && errors == 0,
          std::to_string(trials) + " masks, " + std::to_string(checked) + " forbidden positions, " +
              std::to_string(violations) + " violations, " + std::to_string(errors) + " fit errors"};
}

// ---------------------------------------------------------------------------

Verdict effects_oracle() {
  Philox rng(77, 0);
  const int dags = 1000;
  double worst = 0.0;
  std::size_t pairs = 0;
  for (int k = 0; k < dags; ++k) {
    const auto n = static_cast<Eigen::Index>(1 + rng.below(12));
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    const double density = rng.uniform();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = a + 1; b < n; ++b) {
        if (rng.bernoulli(density)) {
          A(perm[static_cast<std::size_t>(b)], perm[static_cast<std::size_t>(a)]) = 3.0 * rng.uniform() - 1.5;
        }
      }
    }
    const auto sys = StackedSystem::from_matrix(A);
    for (std::size_t s = 0; s < sys.size(); ++s) {
      for (std::size_t t = 0; t < sys.size(); ++t) {
        worst = std::max(worst, std::abs(total_effect(sys, s, t).value - oracle_total_effect(sys, s, t)));
        ++pairs;
      }
    }
  }
  return {worst <= 1e-10, std::to_string(dags) + " DAGs, " + std::to_string(pairs) + " pairs, max deviation " +
                              fmt(worst, 3)};
}

// ---------------------------------------------------------------------------

Verdict bootstrap_coverage() {
  const auto start = std::chrono::steady_clock::now();
  const int outer = 200;
  const std::size_t B = 500;
  const std::size_t n = 500;
  const GeneratorSpec probe = small_spec(n, 0);
  const PanelSchema& schema = probe.truth.schema;
  const EffectQuery query{{schema.intervention(), 1}, {schema.index_of("x2"), 1}};
  const auto sys = StackedSystem::build(probe.truth);
  const double theta = total_effect(sys, query.source, query.target).value;

  int covered = 0;
  bool deterministic = true;
  for (int r = 0; r < outer; ++r) {
    const GeneratorSpec spec = small_spec(n, 5000 + static_cast<std::uint64_t>(r));
    const Panel panel = generate(spec).panel;
    const BootstrapConfig config{.B = B, .seed = static_cast<std::uint64_t>(r), .ci_level = 0.95, .workers = 1};
    const BootstrapSummary s = run_bootstrap(panel, *spec.mask, config, {query});
    const QuerySummary& q = s.queries.front();
    if (q.ci_low <= theta && theta <= q.ci_high) ++covered;
    if (r == 0) {
      BootstrapConfig eight = config;
      eight.workers = 8;
      const BootstrapSummary s8 = run_bootstrap(panel, *spec.mask, eight, {query});
      deterministic = s8.queries.front().draws == q.draws &&
                      dump(bootstrap_to_json(s8, schema)) == dump(bootstrap_to_json(s, schema));
    }
  }
  const double elapsed = seconds_since(start);
  const double coverage = static_cast<double>(covered) / outer;
  return {coverage >= 0.90 && coverage <= 0.98 && elapsed <= 1800.0 && deterministic,
          "theta " + fmt(theta) + ", coverage " + std::to_string(covered) + "/" + std::to_string(outer) + " = " +
              fmt(coverage, 3) + ", workers {1,8} identical: " + (deterministic ? "yes" : "no") + ", " +
              fmt(elapsed, 4) + " s"};
}

// ---------------------------------------------------------------------------

Verdict fixture_exactness() {
  const EffectBundle b = bundle_from_json(read_json_file(wt::fixture_path("guidance/bundle.json")));
  const auto s = static_cast<Eigen::Index>(*b.source_index("Health-guidance"));
  const auto bmi = static_cast<Eigen::Index>(*b.target_index("BMI"));
  const auto ldl = static_cast<Eigen::Index>(*b.target_index("LDL"));
  const std::size_t lag0 = *b.lag_index(0);
  const bool bundle_ok = b.point[lag0](s, bmi) == -0.129 && b.ci_low[lag0](s, bmi) == -0.165 &&
                         b.ci_high[lag0](s, bmi) == -0.094 && b.is_uncertain(lag0, static_cast<std::size_t>(s), static_cast<std::size_t>(ldl)) &&
                         !b.is_uncertain(lag0, static_cast<std::size_t>(s), static_cast<std::size_t>(bmi));

  const LongitudinalModel model = model_from_json(read_json_file(wt::fixture_path("guidance/model.json")));
  const Eigen::MatrixXd table = guidance_effect_table(StackedSystem::build(model), model.schema, 1, {0, 1, 2});
  const auto bmi_row = static_cast<Eigen::Index>(0);
  const bool table_ok = table(bmi_row, 0) == -0.129;

  const std::vector<double> draws = wt::guidance_draws();
  const Interval ci = percentile_interval(std::span<const double>(draws.data(), 1000), 0.95);
  const bool draws_ok = ci.low == -0.165 && ci.high == -0.094;

  return {bundle_ok && table_ok && draws_ok,
          std::string("bundle BMI lag 0 ") + fmt(b.point[lag0](s, bmi), 17) + " [" + fmt(b.ci_low[lag0](s, bmi), 17) +
              ", " + fmt(b.ci_high[lag0](s, bmi), 17) + "], LDL lag 0 includesZero " +
              (b.is_uncertain(lag0, static_cast<std::size_t>(s), static_cast<std::size_t>(ldl)) ? "true" : "false") +
              ", model table " + fmt(table(bmi_row, 0), 17) + ", draws CI [" + fmt(ci.low, 17) + ", " +
              fmt(ci.high, 17) + "]"};
}

// ---------------------------------------------------------------------------

std::map<std::string, double> mid_profile(const EffectBundle& b) {
  std::map<std::string, double> out;
  for (std::size_t k = 0; k < b.profile.size(); ++k) {
    const auto it = b.bounds.find(b.profile[k]);
    out[b.profile[k]] = it == b.bounds.end() ? 0.0 : 0.5 * (it->second.low + it->second.high);
    if (b.profile_kinds[k] == ValueKind::Binary) out[b.profile[k]] = 0.0;
  }
  return out;
}

// Every cell of the bundle, forward and goal; counts Estimate answers on
// uncertain cells.
std::size_t scan_bundle(const EffectBundle& b, const std::map<std::string, double>& base, std::size_t& cells) {
  std::size_t bad = 0;
  for (std::size_t l = 0; l < b.lags.size(); ++l) {
    for (std::size_t s = 0; s < b.sources.size(); ++s) {
      for (std::size_t t = 0; t < b.targets.size(); ++t) {
        if (!b.is_uncertain(l, s, t)) continue;
        ++cells;
        const std::size_t k = *b.profile_index(b.sources[s]);
        const bool binary = b.profile_kinds[k] == ValueKind::Binary;
        const double current = base.at(b.sources[s]);
        const double fwd = binary ? 1.0 - current : current;
        const SimAnswer f = forward_query(b, {SimMode::Forward, base, b.sources[s], b.targets[t], b.lags[l], fwd});
        const SimAnswer g =
            goal_seek(b, {SimMode::GoalSeek, base, b.sources[s], b.targets[t], b.lags[l], base.at(b.targets[t])});
        if (f.status == SimStatus::Estimate || f.value || g.status == SimStatus::Estimate || g.value) ++bad;
      }
    }
  }
  return bad;
}

Verdict guardrail(const std::string& pipeline_bundle) {
  std::size_t uncertain_cells = 0, bad = 0;
  const EffectBundle fixture = bundle_from_json(read_json_file(wt::fixture_path("guidance/bundle.json")));
  bad += scan_bundle(fixture, mid_profile(fixture), uncertain_cells);
  if (!pipeline_bundle.empty()) {
    const EffectBundle built = bundle_from_json(read_json_file(pipeline_bundle));
    bad += scan_bundle(built, mid_profile(built), uncertain_cells);
  }
  Philox rng(91, 0);
  for (int k = 0; k < 50; ++k) {
    const EffectBundle b = wt::random_bundle(rng);
    bad += scan_bundle(b, wt::random_baseline(b, rng), uncertain_cells);
  }

  // round trip on random admissible cells: continuous source, interval away
  // from zero, standardized effect above the inversion threshold
  std::size_t trips = 0;
  double worst = 0.0;
  int non_estimate = 0;
  while (trips < 1000) {
    const EffectBundle b = wt::random_bundle(rng);
    const auto base = wt::random_baseline(b, rng);
    for (std::size_t l = 0; l < b.lags.size() && trips < 1000; ++l) {
      for (std::size_t s = 0; s < b.sources.size() && trips < 1000; ++s) {
        if (b.profile_kinds[*b.profile_index(b.sources[s])] == ValueKind::Binary) continue;
        for (std::size_t t = 0; t < b.targets.size() && trips < 1000; ++t) {
          const double point = b.point[l](static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
          if (b.is_uncertain(l, s, t) || std::abs(point) < 1e-6) continue;
          const RoundTrip r = round_trip(b, base, b.sources[s], b.targets[t], b.lags[l], 20.0 * rng.normal());
          ++trips;
          if (r.status != SimStatus::Estimate) {
            ++non_estimate;
            continue;
          }
          worst = std::max(worst, *r.residual);
        }
      }
    }
  }
  return {bad == 0 && worst <= 1e-9 && non_estimate == 0,
          std::to_string(uncertain_cells) + " uncertain cells scanned, " + std::to_string(bad) +
              " numeric answers; " + std::to_string(trips) + " round trips, max residual " + fmt(worst, 3) +
              ", " + std::to_string(non_estimate) + " without estimate"};
}

// ---------------------------------------------------------------------------

Verdict motif_rule() {
  const PanelSchema schema = PanelSchema::paper_shaped();
  // outcome-local: BMI 0, SBP 1, DBP 2, HbA1c 3, LDL 4
  struct Case {
    std::string name;
    std::vector<std::vector<std::tuple<int, int, double>>> edges;  // [t-1] (parent, child, b)
    Motif expected;
  };
  const std::vector<Case> cases = {
      {"stable BMI->SBP",
       {{{0, 1, 0.6}}, {{0, 1, 0.5}}, {{0, 1, 0.4}}},
       {{{0, 1}}, {}, 0.01, true}},
      {"SBP/DBP flip",
       {{{1, 2, 0.5}}, {{2, 1, 0.4}}, {{1, 2, 0.3}}},
       {{}, {{1, 2}}, 0.01, true}},
      {"missing at one time",
       {{{0, 3, 0.3}}, {}, {{0, 3, 0.3}}},
       {{}, {}, 0.01, true}},
      {"below threshold at one time",
       {{{3, 4, 0.2}}, {{3, 4, 0.005}}, {{3, 4, 0.2}}},
       {{}, {}, 0.01, true}},
      {"mixed",
       {{{0, 1, 0.6}, {1, 2, 0.5}, {0, 3, 0.4}, {3, 4, -0.5}},
        {{0, 1, 0.6}, {2, 1, 0.5}, {0, 3, 0.4}, {3, 4, -0.6}},
        {{0, 1, 0.6}, {1, 2, 0.5}, {3, 4, -0.7}}},
       {{{0, 1}, {3, 4}}, {{1, 2}}, 0.01, true}},
  };
  int ok = 0;
  std::string failed;
  for (const Case& c : cases) {
    LongitudinalModel m = LongitudinalModel::zero(schema);
    for (std::size_t t = 1; t <= 3; ++t) {
      for (const auto& [parent, child, b] : c.edges[t - 1]) m.B_within[t](child, parent) = b;
    }
    if (extract_motif(m) == c.expected) {
      ++ok;
    } else {
      failed += " [" + c.name + "]";
    }
  }
  return {ok == static_cast<int>(cases.size()),
          std::to_string(ok) + "/" + std::to_string(cases.size()) + " constructed cases" +
              (failed.empty() ? "" : ", failed:" + failed)};
}

// ---------------------------------------------------------------------------

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = app::run(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

bool run_pipeline(const std::string& dir) {
  const std::string panel = dir + "/panel.csv";
  const std::string mask = dir + "/mask.json";
  return cli({"synth", "--seed", "7", "--out", dir}) == 0 && cli({"fit", "--panel", panel, "--mask", mask}) == 0 &&
         cli({"bootstrap", "--panel", panel, "--mask", mask, "--B", "50", "--seed", "7"}) == 0 &&
         cli({"effects", "--model", dir + "/model.json"}) == 0 && cli({"motif", "--model", dir + "/model.json"}) == 0;
}

Verdict pipeline_determinism(const std::string& first, const std::string& second) {
  if (!run_pipeline(first) || !run_pipeline(second)) return {false, "a pipeline step failed"};
  std::size_t files = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::directory_iterator(first)) {
    const std::string name = entry.path().filename().string();
    std::string a = wt::read_file(entry.path().string());
    std::string b = wt::read_file(second + "/" + name);
    if (name.ends_with(".manifest.json")) {
      json ja = json::parse(a), jb = json::parse(b);
      ja.erase("timestamp");
      jb.erase("timestamp");
      a = ja.dump();
      b = jb.dump();
    }
    ++files;
    if (a != b) differing.push_back(name);
  }
  std::string detail = std::to_string(files) + " artifacts compared, " + std::to_string(differing.size()) + " differ";
  for (const auto& d : differing) detail += " " + d;
  return {differing.empty() && files >= 15, detail};
}

}  // namespace

int main() {
  wt::TempDir a, b;
  struct Criterion {
    std::string name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {"structure recovery", structure_recovery},
      {"mask compliance fuzz", mask_compliance},
      {"effects oracle equivalence", effects_oracle},
      {"bootstrap coverage", bootstrap_coverage},
      {"guidance fixture exactness", fixture_exactness},
      {"pipeline determinism", [&] { return pipeline_determinism(a.path().string(), b.path().string()); }},
      {"guardrail soundness", [&] { return guardrail(a.file("bundle.json")); }},
      {"motif rule", motif_rule},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << ": " << v.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
