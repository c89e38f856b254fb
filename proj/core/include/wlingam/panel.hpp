#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wlingam {

/// Role of a recorded variable in the longitudinal structural model.
enum class Role {
  Intervention,  // v: binary program indicator, no within-time parents
  Outcome,       // x: continuous, subject to within-time discovery
  Exogenous,     // z: observed inputs used for adjustment
  BaselineOnly,  // w: observed at time point 0 only
};

enum class ValueKind { Continuous, Binary, Categorical };

std::string_view to_string(Role role);
std::string_view to_string(ValueKind kind);
Role role_from_string(std::string_view s);
ValueKind kind_from_string(std::string_view s);

struct Variable {
  std::string name;
  Role role = Role::Outcome;
  ValueKind kind = ValueKind::Continuous;
  // Free-form block label ("medication", "lifestyle", "background", ...).
  // Only used to derive a default block order.
  std::string group;

  bool operator==(const Variable&) const = default;
};

/// Ordered variable list plus calendar labels for each modeled time point.
/// Immutable once constructed; the constructor enforces all invariants.
class PanelSchema {
 public:
  PanelSchema(std::vector<Variable> variables, std::vector<int> time_labels);

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const Variable& variable(std::size_t i) const { return variables_.at(i); }
  std::size_t size() const noexcept { return variables_.size(); }
  std::size_t time_points() const noexcept { return time_labels_.size(); }
  const std::vector<int>& time_labels() const noexcept { return time_labels_; }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws Error(UnknownVariable) when absent.
  std::size_t index_of(std::string_view name) const;

  std::size_t intervention() const noexcept { return intervention_; }
  std::optional<std::size_t> baseline() const noexcept { return baseline_; }
  /// Indices with the given role, in schema order.
  std::vector<std::size_t> indices(Role role) const;
  std::vector<std::size_t> outcomes() const { return indices(Role::Outcome); }
  std::vector<std::size_t> exogenous() const { return indices(Role::Exogenous); }

  /// Layout-only cells: the intervention at time point 0 and a baseline-only
  /// variable after time point 0.
  bool excluded_from_fit(std::size_t var, std::size_t t) const;

  bool operator==(const PanelSchema&) const = default;

  /// The 15-variable annual-screening layout over four measurement years.
  static PanelSchema paper_shaped();

 private:
  std::vector<Variable> variables_;
  std::vector<int> time_labels_;
  std::size_t intervention_ = 0;
  std::optional<std::size_t> baseline_;
};

/// Dense subjects x variables x time tensor. Stored as one n x V slice per
/// time point. Immutable after construction and safe to share across threads.
class Panel {
 public:
  /// `slices[t]` is n x V. Baseline-only columns after t = 0 are overwritten
  /// with the t = 0 value; intervention values at t = 0 are kept as given.
  Panel(PanelSchema schema, std::vector<std::string> subject_ids,
        std::vector<Eigen::MatrixXd> slices);

  const PanelSchema& schema() const noexcept { return schema_; }
  std::size_t subjects() const noexcept { return ids_.size(); }
  std::size_t time_points() const noexcept { return slices_.size(); }
  const std::vector<std::string>& subject_ids() const noexcept { return ids_; }

  /// Read-only n x V view at time point t. Throws Error(OutOfRange).
  const Eigen::MatrixXd& slice_time(std::size_t t) const;
  double at(std::size_t subject, std::size_t var, std::size_t t) const;

  /// Panel built from the given subject rows (duplicates allowed). Used by
  /// the subject-level bootstrap; ids are suffixed with the draw position.
  Panel resample(std::span<const std::size_t> rows) const;

  bool operator==(const Panel& other) const;

 private:
  PanelSchema schema_;
  std::vector<std::string> ids_;
  std::vector<Eigen::MatrixXd> slices_;
};

struct IngestResult {
  Panel panel;
  std::size_t dropped = 0;
  std::vector<std::string> dropped_ids;
};

/// Long-format CSV: header `subject_id,time_index,variable,value`.
/// Subjects missing any required cell are dropped and counted. Layout-only
/// cells may be absent (they are carried / zero-filled).
IngestResult ingest_long_csv(std::istream& in, const PanelSchema& schema);
IngestResult ingest_long_csv(const std::string& path, const PanelSchema& schema);

/// Writes every cell with shortest round-trip formatting, so ingesting the
/// output reproduces the panel bit for bit.
void emit_long_csv(const Panel& panel, std::ostream& out);

struct VariableTimeSummary {
  double mean = 0.0;
  double sd = 0.0;
  std::optional<double> prevalence;  // binary variables only
};

struct PanelSummary {
  std::size_t subjects = 0;
  std::size_t time_points = 0;
  std::size_t person_years = 0;
  // [variable][time]
  std::vector<std::vector<VariableTimeSummary>> cells;
};

PanelSummary summarize(const Panel& panel);

}  // namespace wlingam
