#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wlingam/panel.hpp"

namespace wlingam {

/// Regressor dropped from an equation, e.g. a constant intervention column.
struct AuditFlag {
  std::size_t t = 0;
  std::string equation;  // variable name of the left-hand side
  std::string column;    // "<name>(t)" or "<name>(t-1)"
  std::string code;      // "DegenerateColumn"

  bool operator==(const AuditFlag&) const = default;
};

/// Optional equations for the exogenous inputs, used only when effects are
/// propagated through medication/lifestyle nodes.
///   z(t) = c + a v(t) + Z z(t) + Zc z(t-1) + X x(t-1) + g v(t-1) + [d w(0)]_{t=1}
struct AuxiliaryEquations {
  std::vector<Eigen::VectorXd> v_within;  // [t] q
  std::vector<Eigen::VectorXd> v_cross;   // [t] q
  std::vector<Eigen::MatrixXd> z_within;  // [t] q x q
  std::vector<Eigen::MatrixXd> z_cross;   // [t] q x q
  std::vector<Eigen::MatrixXd> x_cross;   // [t] q x p
  Eigen::VectorXd w;                      // q, t = 1 only
  std::vector<Eigen::VectorXd> intercepts;
};

struct Provenance {
  std::string schema_hash;
  std::string mask_hash;
  std::string panel_hash;
  std::string version = WLINGAM_VERSION;

  bool operator==(const Provenance&) const = default;
};

/// Fitted coefficient blocks, indexed by time point. Index 0 holds
/// zero-sized placeholders: the first time point carries initial conditions
/// only. Outcome-local indices follow schema.outcomes(), exogenous-local
/// indices follow schema.exogenous().
struct LongitudinalModel {
  PanelSchema schema;
  std::vector<Eigen::VectorXd> alpha;      // [t] p
  std::vector<Eigen::MatrixXd> B_within;   // [t] p x p (child, parent)
  std::vector<Eigen::MatrixXd> B_cross;    // [t] p x p, x(t-1) -> x(t)
  std::vector<Eigen::MatrixXd> C_within;   // [t] p x q
  std::vector<Eigen::MatrixXd> C_cross;    // [t] p x q, z(t-1) -> x(t)
  Eigen::VectorXd delta;                   // p, w(0) -> x(1)
  std::vector<Eigen::VectorXd> intercepts; // [t] p
  std::vector<std::vector<std::size_t>> ordering;  // [t] outcome-local
  std::vector<Eigen::VectorXd> residual_variance;  // [t] p
  std::vector<Eigen::VectorXd> scales;     // [t] V, sample sd of every variable
  std::vector<AuditFlag> audit;
  std::optional<AuxiliaryEquations> auxiliary;
  Provenance provenance;

  std::size_t p() const { return schema.outcomes().size(); }
  std::size_t q() const { return schema.exogenous().size(); }
  std::size_t time_points() const { return schema.time_points(); }

  /// All blocks zero, orderings 0..p-1, unit scales.
  static LongitudinalModel zero(const PanelSchema& schema);
};

/// Reduced-form one-step prediction of x(t). `w` must be supplied iff t = 1
/// and the schema has a baseline-only variable.
/// Solved by forward substitution in ordering[t].
Eigen::VectorXd predict_one_step(const LongitudinalModel& model, const Eigen::VectorXd& x_prev, double v,
                                 const Eigen::VectorXd& z, const Eigen::VectorXd& z_prev,
                                 std::optional<double> w, std::size_t t);

}  // namespace wlingam
