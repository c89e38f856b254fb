#pragma once

#include "wlingam/mask.hpp"
#include "wlingam/model.hpp"
#include "wlingam/panel.hpp"

namespace wlingam {

struct FitOptions {
  /// Also fit equations for the exogenous inputs (needed when effects are
  /// propagated through them).
  bool auxiliary = false;
  /// Fill model.provenance with content hashes. Bootstrap replicates skip it.
  bool provenance = true;
};

/// Per time point t >= 1:
///   1. adjustment set [v(t), z(t), z(t-1), x(t-1), w(0) iff t = 1], each
///      column kept only where the mask admits it for that outcome;
///   2. outcomes residualized on their adjustment set;
///   3. within-time ordering and structure on the residuals;
///   4. each outcome re-estimated by OLS on its admissible predecessors plus
///      its adjustment set.
/// Constant regressors are dropped with a DegenerateColumn audit flag; any
/// other collinearity throws Error(RankDeficient) naming the columns.
LongitudinalModel fit(const Panel& panel, const PKMask& mask, const FitOptions& options = {});

/// SHA-256 over subject ids and raw cell values.
std::string panel_hash(const Panel& panel);

}  // namespace wlingam
