#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "wlingam/panel.hpp"

namespace wlingam {

using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Mask entry values. Orientation: entry (child, parent) constrains the
/// edge parent -> child.
namespace mark {
inline constexpr int kUnknown = -1;
inline constexpr int kForbidden = 0;
inline constexpr int kRequired = 1;
}  // namespace mark

enum class BlockKind { Intervention, Background, Covariate, Outcome, Baseline };

std::string_view to_string(BlockKind kind);
BlockKind block_kind_from_string(std::string_view s);

/// A named group of variables sharing recording characteristics.
/// Background blocks (e.g. age, sex) act only within time and evolve only
/// through their own lag.
struct Block {
  std::string name;
  BlockKind kind = BlockKind::Covariate;
  std::vector<std::size_t> members;
};

/// Ordered tiers of blocks. Within-time edges run from an earlier tier to a
/// later tier, or inside the outcome block; blocks sharing a tier are
/// mutually unlinked within time.
struct BlockOrder {
  std::vector<std::vector<Block>> tiers;
};

/// [intervention | background | baseline] < [covariate groups] < [outcomes],
/// with covariate blocks split by Variable::group.
BlockOrder default_block_order(const PanelSchema& schema);

/// Time- and lag-indexed constraint tensor.
///   within[t]     : V x V, entries in {-1, 0, 1}
///   cross[t][lag] : V x V, entries in {0, 1}; lag in [0, T). Slot 0 is
///                   unused (within-time links live in `within`) and only
///                   lag 1 may hold ones.
struct PKMask {
  std::size_t variables = 0;
  std::size_t time_points = 0;
  std::vector<IntMatrix> within;
  std::vector<std::vector<IntMatrix>> cross;

  /// Every entry forbidden.
  static PKMask forbidden(std::size_t variables, std::size_t time_points);

  int within_at(std::size_t t, std::size_t child, std::size_t parent) const {
    return within[t](static_cast<Eigen::Index>(child), static_cast<Eigen::Index>(parent));
  }
  int cross_at(std::size_t t, std::size_t lag, std::size_t child, std::size_t parent) const {
    return cross[t][lag](static_cast<Eigen::Index>(child), static_cast<Eigen::Index>(parent));
  }

  bool operator==(const PKMask& other) const;
};

/// Encodes the recording workflow:
///   no time reversal; cross-time links only t-1 -> t; no within-time
///   parents of the intervention; no within-time links between blocks of
///   one tier (medication vs lifestyle); outcome-outcome directions left
///   unknown; the baseline-only variable is a parent only of the first
///   modeled time point; no direct intervention(t-1) -> outcome(t) links.
/// Throws Error(BlockOrderInconsistent).
PKMask build_default_mask(const PanelSchema& schema, const BlockOrder& blocks);
PKMask build_default_mask(const PanelSchema& schema);

enum class ViolationKind {
  ValueOutOfDomain,
  SelfLoop,
  RequiredEdgesCyclic,
  NoInstantaneousParentsOfIntervention,
  CrossLagBeyondOne,
  CrossLagZeroSlotUsed,
  EdgeIntoBaselineOnly,
  BaselineOnlyNotIsolated,
  WithinTimeAtTimeZero,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t t = 0;
  std::size_t lag = 0;
  std::size_t child = 0;
  std::size_t parent = 0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

/// Throws Error(DimensionMismatch) when the mask does not fit the schema.
ValidationReport validate_mask(const PKMask& mask, const PanelSchema& schema);

struct EdgeCounts {
  std::size_t within_unknown = 0;
  std::size_t within_required = 0;
  std::size_t cross_allowed = 0;

  bool operator==(const EdgeCounts&) const = default;
};

/// Off-diagonal counts summed over all time points and lags.
EdgeCounts admissible_edge_count(const PKMask& mask);

/// True iff the directed graph over entries equal to `kRequired` has a cycle.
bool required_edges_cyclic(const IntMatrix& within);

/// True iff every edge of `adjacency` (nonzero (child, parent) entries) sits
/// on a non-forbidden mask entry and every required entry is an edge.
bool admits(const IntMatrix& within, const IntMatrix& adjacency);

}  // namespace wlingam
