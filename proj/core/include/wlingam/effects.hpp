#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wlingam/model.hpp"

namespace wlingam {

/// A (variable, time) node of the stacked system.
struct Node {
  std::size_t var = 0;
  std::size_t time = 0;

  auto operator<=>(const Node&) const = default;
};

/// One coefficient matrix over all (variable, time) nodes. A(child, parent)
/// is the structural coefficient of parent in the equation of child.
/// Nodes: at t = 0 the outcomes, exogenous inputs and the baseline-only
/// variable; at t >= 1 the intervention, exogenous inputs and outcomes.
/// The intervention at t = 0 is a layout placeholder and has no node.
class StackedSystem {
 public:
  /// Throws Error(MissingAuxiliary) when auxiliary propagation is requested
  /// but the model carries no auxiliary equations.
  static StackedSystem build(const LongitudinalModel& model, bool include_auxiliary = false);

  /// Arbitrary DAG over `A.rows()` unnamed nodes (var = index, time = 0).
  /// Throws Error(NonAdmissibleModel) when A has a directed cycle.
  static StackedSystem from_matrix(Eigen::MatrixXd A);

  std::size_t size() const noexcept { return static_cast<std::size_t>(A_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return A_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  /// Row index of a node. Throws Error(OutOfRange) when absent.
  std::size_t index(Node node) const;
  std::optional<std::size_t> find(Node node) const;
  /// Node indices in a topological order (parents first).
  const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

  /// Column `source` of (I - A)^{-1}: total effect of the source on every
  /// node, by forward substitution in topological order.
  Eigen::VectorXd effects_from(std::size_t source) const;

 private:
  StackedSystem(Eigen::MatrixXd A, std::vector<Node> nodes);

  Eigen::MatrixXd A_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> topo_;
};

struct TotalEffect {
  Node source;
  Node target;
  std::ptrdiff_t lag = 0;
  double value = 0.0;
};

/// Sum over all directed source -> target paths of coefficient products;
/// 1 when source == target.
TotalEffect total_effect(const StackedSystem& sys, std::size_t source, std::size_t target);
TotalEffect total_effect(const StackedSystem& sys, Node source, Node target);

/// Depth-first enumeration of every directed path. Exponential; refuses
/// systems with more than 16 nodes (Error(OracleTooLarge)).
double oracle_total_effect(const StackedSystem& sys, std::size_t source, std::size_t target);

/// sum_{k=0}^{N} A^k, equal to (I - A)^{-1} for a nilpotent A.
Eigen::MatrixXd neumann_inverse(const Eigen::MatrixXd& A);

/// Total effects of the intervention at `anchor` on every outcome at
/// anchor + lag: rows follow schema.outcomes(), columns follow `horizons`.
/// Throws Error(HorizonOutOfRange) naming the first horizon past the panel,
/// Error(OutOfRange) for an anchor without an intervention node.
Eigen::MatrixXd guidance_effect_table(const StackedSystem& sys, const PanelSchema& schema, std::size_t anchor,
                                      const std::vector<std::size_t>& horizons);

}  // namespace wlingam
