#include "wlingam/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "wlingam/effects.hpp"
#include "wlingam/error.hpp"

namespace wlingam {

std::map<std::string, Bounds> default_bounds(const PanelSchema& schema) {
  static const std::map<std::string, Bounds> known = {
      {"BMI", {10.0, 60.0}},   {"SBP", {70.0, 250.0}}, {"DBP", {40.0, 150.0}}, {"HbA1c", {3.0, 15.0}},
      {"LDL", {20.0, 400.0}},  {"Age", {18.0, 110.0}}, {"Check_num", {0.0, 3.0}},
  };
  std::map<std::string, Bounds> out;
  for (const auto& v : schema.variables()) {
    if (auto it = known.find(v.name); it != known.end()) {
      out[v.name] = it->second;
    } else if (v.kind == ValueKind::Binary) {
      out[v.name] = {0.0, 1.0};
    }
  }
  return out;
}

std::map<std::string, std::string> default_messages() {
  return {
      {"estimate", "Changing {source} is expected to change {target} by {value} at lag {lag}."},
      {"goal_estimate", "Reaching {target} = {desired} at lag {lag} requires {source} = {value}."},
      {"goal_binary", "Setting {source} to {value} brings {target} closest to {desired} (gap {gap})."},
      {"no_detectable_effect",
       "No statistically detectable effect of {source} on {target} at lag {lag}; no numerical recommendation is shown."},
      {"not_supported", "The query is not supported under the current configuration."},
      {"input_implausible", "An input value is outside its plausible range: {detail}."},
  };
}

std::string_view to_string(SimStatus status) {
  switch (status) {
    case SimStatus::Estimate: return "Estimate";
    case SimStatus::NoDetectableEffect: return "NoDetectableEffect";
    case SimStatus::NotSupported: return "NotSupported";
    case SimStatus::InputImplausible: return "InputImplausible";
  }
  return "NotSupported";
}

namespace {

std::optional<std::size_t> find_name(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

Interval ordered(double a, double b) { return a <= b ? Interval{a, b} : Interval{b, a}; }

SimAnswer status_only(SimStatus status, std::string message, std::string detail = {}) {
  SimAnswer a;
  a.status = status;
  a.message = std::move(message);
  a.detail = std::move(detail);
  return a;
}

struct Cell {
  std::size_t lag;
  std::size_t source;
  std::size_t target;
  std::size_t source_profile;
  double point;
  double low;
  double high;
  bool uncertain;
};

// Common checks; returns an answer when the query stops early.
std::optional<SimAnswer> resolve(const EffectBundle& b, const SimQuery& q, Cell& cell) {
  for (const auto& name : {q.source, q.target}) {
    if (!b.profile_index(name)) throw Error(ErrorCode::UnknownVariable, "unknown variable '" + name + "'");
  }
  for (const auto& [name, value] : q.baseline) {
    if (!b.profile_index(name)) throw Error(ErrorCode::UnknownVariable, "unknown variable '" + name + "'");
  }
  for (const auto& name : b.profile) {
    if (!q.baseline.count(name)) {
      throw Error(ErrorCode::InvalidArgument, "baseline profile is missing '" + name + "'");
    }
  }
  const auto s = b.source_index(q.source);
  const auto t = b.target_index(q.target);
  const auto l = b.lag_index(q.horizon);
  if (!s) return status_only(SimStatus::NotSupported, "not_supported", q.source + " cannot be intervened on");
  if (!t) return status_only(SimStatus::NotSupported, "not_supported", q.target + " is not a target outcome");
  if (!l) {
    return status_only(SimStatus::NotSupported, "not_supported",
                       "horizon " + std::to_string(q.horizon) + " is outside the modeled range");
  }
  if (auto bad = validate_inputs(b, q)) return status_only(SimStatus::InputImplausible, "input_implausible", *bad);
  const auto si = static_cast<Eigen::Index>(*s);
  const auto ti = static_cast<Eigen::Index>(*t);
  cell = {*l, *s, *t, *b.profile_index(q.source), b.point[*l](si, ti), b.ci_low[*l](si, ti),
          b.ci_high[*l](si, ti), b.is_uncertain(*l, *s, *t)};
  return std::nullopt;
}

SimAnswer forward_cell(const EffectBundle& b, const SimQuery& q, const Cell& c, double forward_value) {
  if (c.uncertain) return status_only(SimStatus::NoDetectableEffect, "no_detectable_effect");
  const double delta = forward_value - q.baseline.at(q.source);
  const double bit = baseline_implied_target(b, q);
  SimAnswer a;
  a.status = SimStatus::Estimate;
  a.message = "estimate";
  a.value = c.point * delta;
  a.interval = ordered(c.low * delta, c.high * delta);
  a.baseline_implied_target = bit;
  a.predicted_level = bit + *a.value;
  a.level_interval = Interval{bit + a.interval->low, bit + a.interval->high};
  return a;
}

bool is_binary(const EffectBundle& b, std::size_t profile_index) {
  return b.profile_kinds[profile_index] == ValueKind::Binary;
}

}  // namespace

std::optional<std::size_t> EffectBundle::source_index(std::string_view name) const { return find_name(sources, name); }
std::optional<std::size_t> EffectBundle::target_index(std::string_view name) const { return find_name(targets, name); }
std::optional<std::size_t> EffectBundle::profile_index(std::string_view name) const { return find_name(profile, name); }
std::optional<std::size_t> EffectBundle::lag_index(std::size_t lag) const {
  auto it = std::find(lags.begin(), lags.end(), lag);
  if (it == lags.end()) return std::nullopt;
  return static_cast<std::size_t>(it - lags.begin());
}

std::optional<std::string> validate_inputs(const EffectBundle& bundle, const SimQuery& q) {
  auto check = [&](const std::string& name, double value, const char* what) -> std::optional<std::string> {
    if (!std::isfinite(value)) return std::string(what) + " " + name + " is not a finite number";
    const auto idx = bundle.profile_index(name);
    if (idx && bundle.profile_kinds[*idx] == ValueKind::Binary && value != 0.0 && value != 1.0) {
      return std::string(what) + " " + name + " = " + std::to_string(value) + " must be 0 or 1";
    }
    if (auto it = bundle.bounds.find(name); it != bundle.bounds.end()) {
      if (value < it->second.low || value > it->second.high) {
        return std::string(what) + " " + name + " = " + std::to_string(value) + " outside [" +
               std::to_string(it->second.low) + ", " + std::to_string(it->second.high) + "]";
      }
    }
    return std::nullopt;
  };
  for (const auto& name : bundle.profile) {
    auto it = q.baseline.find(name);
    if (it == q.baseline.end()) continue;
    if (auto bad = check(name, it->second, "baseline")) return bad;
  }
  if (q.mode == SimMode::Forward) return check(q.source, q.value, "forward value of");
  return check(q.target, q.value, "desired");
}

double baseline_implied_target(const EffectBundle& bundle, const SimQuery& q) {
  const std::size_t l = bundle.lag_index(q.horizon).value();
  const std::size_t t = bundle.target_index(q.target).value();
  const auto ti = static_cast<Eigen::Index>(t);
  double level = bundle.offset[l](ti);
  for (std::size_t k = 0; k < bundle.profile.size(); ++k) {
    const double g = bundle.gain[l](ti, static_cast<Eigen::Index>(k));
    if (g != 0.0) level += g * q.baseline.at(bundle.profile[k]);
  }
  return level;
}

SimAnswer forward_query(const EffectBundle& bundle, const SimQuery& q) {
  Cell c{};
  if (auto early = resolve(bundle, q, c)) return *early;
  return forward_cell(bundle, q, c, q.value);
}

SimAnswer goal_seek(const EffectBundle& bundle, const SimQuery& q) {
  Cell c{};
  if (auto early = resolve(bundle, q, c)) return *early;
  const double current = q.baseline.at(q.source);

  if (is_binary(bundle, c.source_profile)) {
    if (c.uncertain) return status_only(SimStatus::NoDetectableEffect, "no_detectable_effect");
    std::optional<SimAnswer> best;
    double best_setting = current;
    double best_distance = 0.0;
    for (double setting : {current, 1.0 - current}) {
      SimAnswer a = forward_cell(bundle, q, c, setting);
      const double distance = std::abs(*a.predicted_level - q.value);
      if (!best || distance < best_distance) {
        best = a;
        best_setting = setting;
        best_distance = distance;
      }
    }
    SimAnswer a = *best;
    a.message = "goal_binary";
    a.gap = q.value - *a.predicted_level;
    a.value = best_setting;
    return a;
  }

  const double sd_source = bundle.scales.count(q.source) ? bundle.scales.at(q.source) : 1.0;
  const double sd_target = bundle.scales.count(q.target) ? bundle.scales.at(q.target) : 1.0;
  const double standardized = sd_target > 0.0 ? c.point * sd_source / sd_target : c.point;
  if (c.uncertain) {
    return status_only(SimStatus::NotSupported, "not_supported", "the effect interval includes zero");
  }
  if (std::abs(standardized) < kSingularEpsilon) {
    return status_only(SimStatus::NotSupported, "not_supported", "the effect is too small to invert");
  }
  const double bit = baseline_implied_target(bundle, q);
  const double gap = q.value - bit;
  SimAnswer a;
  a.status = SimStatus::Estimate;
  a.message = "goal_estimate";
  a.value = current + gap / c.point;
  a.interval = ordered(current + gap / c.low, current + gap / c.high);
  a.baseline_implied_target = bit;
  a.predicted_level = q.value;
  return a;
}

RoundTrip round_trip(const EffectBundle& bundle, const std::map<std::string, double>& baseline,
                     const std::string& source, const std::string& target, std::size_t horizon, double desired) {
  SimQuery goal{SimMode::GoalSeek, baseline, source, target, horizon, desired};
  const SimAnswer g = goal_seek(bundle, goal);
  if (g.status != SimStatus::Estimate) return {g.status, std::nullopt};
  // The required setting may fall outside the plausible range, which would
  // stop forward_query at validation; evaluate the cell directly instead.
  Cell c{};
  if (auto early = resolve(bundle, goal, c)) return {early->status, std::nullopt};
  const SimAnswer f = forward_cell(bundle, goal, c, *g.value);
  if (f.status != SimStatus::Estimate) return {f.status, std::nullopt};
  return {SimStatus::Estimate, std::abs(*f.predicted_level - desired)};
}

std::vector<EffectQuery> bundle_queries(const PanelSchema& schema, std::size_t anchor) {
  if (anchor < 1 || anchor >= schema.time_points()) {
    throw Error(ErrorCode::OutOfRange, "anchor time " + std::to_string(anchor) + " has no intervention node");
  }
  std::vector<EffectQuery> out;
  for (std::size_t s = 0; s < schema.size(); ++s) {
    if (schema.variable(s).role == Role::BaselineOnly) continue;
    for (std::size_t lag = 0; anchor + lag < schema.time_points(); ++lag) {
      for (std::size_t x : schema.outcomes()) out.push_back({{s, anchor}, {x, anchor + lag}});
    }
  }
  return out;
}

void refresh_uncertainty(EffectBundle& bundle) {
  bundle.uncertain.clear();
  for (std::size_t l = 0; l < bundle.lags.size(); ++l) {
    const auto& lo = bundle.ci_low[l];
    const auto& hi = bundle.ci_high[l];
    IntMatrix u(lo.rows(), lo.cols());
    for (Eigen::Index i = 0; i < lo.rows(); ++i) {
      for (Eigen::Index j = 0; j < lo.cols(); ++j) u(i, j) = (lo(i, j) <= 0.0 && 0.0 <= hi(i, j)) ? 1 : 0;
    }
    bundle.uncertain.push_back(std::move(u));
  }
}

void fill_trajectory(EffectBundle& bundle, const LongitudinalModel& model) {
  const PanelSchema& schema = model.schema;
  const auto outcomes = schema.outcomes();
  const auto exogenous = schema.exogenous();
  const std::size_t P = bundle.profile.size();
  const auto nt = static_cast<Eigen::Index>(bundle.targets.size());

  // level of each target at each lag for a given profile
  auto trajectory = [&](const Eigen::VectorXd& profile) {
    std::vector<Eigen::VectorXd> levels;
    Eigen::VectorXd x(static_cast<Eigen::Index>(outcomes.size()));
    Eigen::VectorXd z(static_cast<Eigen::Index>(exogenous.size()));
    for (std::size_t i = 0; i < outcomes.size(); ++i) x(static_cast<Eigen::Index>(i)) = profile(static_cast<Eigen::Index>(outcomes[i]));
    for (std::size_t k = 0; k < exogenous.size(); ++k) z(static_cast<Eigen::Index>(k)) = profile(static_cast<Eigen::Index>(exogenous[k]));
    const double v = profile(static_cast<Eigen::Index>(schema.intervention()));
    std::size_t reached = 0;
    for (std::size_t lag : bundle.lags) {
      while (reached < lag) {
        ++reached;
        x = predict_one_step(model, x, v, z, z, std::nullopt, bundle.anchor_time + reached);
      }
      Eigen::VectorXd level(nt);
      for (Eigen::Index j = 0; j < nt; ++j) {
        const std::size_t var = schema.index_of(bundle.targets[static_cast<std::size_t>(j)]);
        const auto pos = std::find(outcomes.begin(), outcomes.end(), var) - outcomes.begin();
        level(j) = x(static_cast<Eigen::Index>(pos));
      }
      levels.push_back(level);
    }
    return levels;
  };

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P));
  bundle.offset = trajectory(zero);
  bundle.gain.assign(bundle.lags.size(), Eigen::MatrixXd::Zero(nt, static_cast<Eigen::Index>(P)));
  for (std::size_t k = 0; k < P; ++k) {
    Eigen::VectorXd unit = zero;
    unit(static_cast<Eigen::Index>(k)) = 1.0;
    const auto levels = trajectory(unit);
    for (std::size_t l = 0; l < bundle.lags.size(); ++l) {
      bundle.gain[l].col(static_cast<Eigen::Index>(k)) = levels[l] - bundle.offset[l];
    }
  }
}

EffectBundle build_bundle(const LongitudinalModel& model, const BootstrapSummary& summary, std::size_t anchor,
                          std::map<std::string, Bounds> bounds) {
  const PanelSchema& schema = model.schema;
  const auto expected = bundle_queries(schema, anchor);
  if (summary.queries.size() != expected.size()) {
    throw Error(ErrorCode::DimensionMismatch, "bootstrap summary does not cover the bundle queries");
  }
  for (std::size_t k = 0; k < expected.size(); ++k) {
    if (!(summary.queries[k].query == expected[k])) {
      throw Error(ErrorCode::DimensionMismatch, "bootstrap summary does not cover the bundle queries");
    }
  }

  EffectBundle b;
  b.anchor_time = anchor;
  b.anchor_label = schema.time_labels()[anchor];
  b.ci_level = summary.config.ci_level;
  for (std::size_t s = 0; s < schema.size(); ++s) {
    if (schema.variable(s).role != Role::BaselineOnly) b.sources.push_back(schema.variable(s).name);
    b.profile.push_back(schema.variable(s).name);
    b.profile_kinds.push_back(schema.variable(s).kind);
    b.scales[schema.variable(s).name] = model.scales[anchor](static_cast<Eigen::Index>(s));
  }
  for (std::size_t x : schema.outcomes()) b.targets.push_back(schema.variable(x).name);
  for (std::size_t lag = 0; anchor + lag < schema.time_points(); ++lag) b.lags.push_back(lag);

  const auto ns = static_cast<Eigen::Index>(b.sources.size());
  const auto nt = static_cast<Eigen::Index>(b.targets.size());
  b.point.assign(b.lags.size(), Eigen::MatrixXd::Zero(ns, nt));
  b.ci_low = b.point;
  b.ci_high = b.point;
  std::size_t k = 0;
  for (Eigen::Index s = 0; s < ns; ++s) {
    for (std::size_t l = 0; l < b.lags.size(); ++l) {
      for (Eigen::Index t = 0; t < nt; ++t, ++k) {
        const QuerySummary& q = summary.queries[k];
        b.point[l](s, t) = q.point;
        b.ci_low[l](s, t) = q.ci_low;
        b.ci_high[l](s, t) = q.ci_high;
      }
    }
  }
  refresh_uncertainty(b);
  fill_trajectory(b, model);
  b.bounds = std::move(bounds);
  b.messages = default_messages();
  return b;
}

}  // namespace wlingam
