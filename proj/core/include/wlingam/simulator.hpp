#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wlingam/bootstrap.hpp"
#include "wlingam/mask.hpp"
#include "wlingam/model.hpp"

namespace wlingam {

struct Bounds {
  double low = 0.0;
  double high = 0.0;
};

/// Plausibility ranges for the screening-layout variable names; other variables
/// are checked only for binary domain.
std::map<std::string, Bounds> default_bounds(const PanelSchema& schema);

/// Precomputed lookup tables for interactive queries. Effect tables are
/// indexed [lag](source, target). The no-change trajectory of each target
/// is affine in the current-visit profile:
///   level(lag, target) = offset[lag](target) + gain[lag].row(target) . profile
struct EffectBundle {
  std::size_t anchor_time = 1;
  int anchor_label = 0;
  std::vector<std::string> sources;
  std::vector<std::string> targets;
  std::vector<std::size_t> lags;
  std::vector<Eigen::MatrixXd> point;
  std::vector<Eigen::MatrixXd> ci_low;
  std::vector<Eigen::MatrixXd> ci_high;
  std::vector<IntMatrix> uncertain;
  std::vector<std::string> profile;       // variable names, schema order
  std::vector<ValueKind> profile_kinds;
  std::vector<Eigen::VectorXd> offset;    // [lag] targets
  std::vector<Eigen::MatrixXd> gain;      // [lag] targets x profile
  std::map<std::string, double> scales;   // sample sd at the anchor time
  std::map<std::string, Bounds> bounds;
  std::map<std::string, std::string> messages;
  std::string model_hash;
  double ci_level = 0.95;

  std::optional<std::size_t> source_index(std::string_view name) const;
  std::optional<std::size_t> target_index(std::string_view name) const;
  std::optional<std::size_t> lag_index(std::size_t lag) const;
  std::optional<std::size_t> profile_index(std::string_view name) const;
  bool is_uncertain(std::size_t lag, std::size_t s, std::size_t t) const {
    return uncertain[lag](static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) != 0;
  }
};

/// Message template keys and default English texts.
std::map<std::string, std::string> default_messages();

/// Queries covering every modeled variable at `anchor` (sources) and every
/// outcome at anchor + lag for all lags that fit the panel.
std::vector<EffectQuery> bundle_queries(const PanelSchema& schema, std::size_t anchor);

/// Assembles a bundle from a fitted model and a bootstrap run over
/// bundle_queries(model.schema, anchor). Uncertainty flags are exactly
/// ci_low <= 0 <= ci_high.
EffectBundle build_bundle(const LongitudinalModel& model, const BootstrapSummary& summary, std::size_t anchor,
                          std::map<std::string, Bounds> bounds);

/// Recomputes every uncertainty flag from the interval bounds.
void refresh_uncertainty(EffectBundle& bundle);

/// No-change trajectory coefficients from the fitted dynamics: v and z held
/// at their profile values, x rolled forward by predict_one_step.
void fill_trajectory(EffectBundle& bundle, const LongitudinalModel& model);

enum class SimMode { Forward, GoalSeek };
enum class SimStatus { Estimate, NoDetectableEffect, NotSupported, InputImplausible };

std::string_view to_string(SimStatus status);

struct SimQuery {
  SimMode mode = SimMode::Forward;
  std::map<std::string, double> baseline;
  std::string source;
  std::string target;
  std::size_t horizon = 0;
  double value = 0.0;  // forward value of the source, or desired target level
};

struct SimAnswer {
  SimStatus status = SimStatus::NotSupported;
  std::optional<double> value;         // change (forward) or source setting (goal)
  std::optional<Interval> interval;
  std::optional<double> predicted_level;
  std::optional<Interval> level_interval;
  std::optional<double> baseline_implied_target;
  std::optional<double> gap;           // binary goal seeking: desired - achieved
  std::string message;                 // template key
  std::string detail;
};

inline constexpr double kSingularEpsilon = 1e-8;

/// Empty when every input is plausible, otherwise a description of the
/// first offending value.
std::optional<std::string> validate_inputs(const EffectBundle& bundle, const SimQuery& q);

/// Unknown variable names throw Error(UnknownVariable); a baseline missing
/// a profile variable throws Error(InvalidArgument). Unsupported
/// combinations (horizon, non-source variable) return NotSupported.
SimAnswer forward_query(const EffectBundle& bundle, const SimQuery& q);
SimAnswer goal_seek(const EffectBundle& bundle, const SimQuery& q);

/// Model-implied no-change level of the target at the query horizon.
double baseline_implied_target(const EffectBundle& bundle, const SimQuery& q);

struct RoundTrip {
  SimStatus status = SimStatus::NotSupported;
  std::optional<double> residual;
};

/// goal_seek for `desired`, then forward_query at the answer; the residual
/// is |predicted level - desired|.
RoundTrip round_trip(const EffectBundle& bundle, const std::map<std::string, double>& baseline,
                     const std::string& source, const std::string& target, std::size_t horizon, double desired);

}  // namespace wlingam
