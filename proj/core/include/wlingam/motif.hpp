#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wlingam/model.hpp"

namespace wlingam {

/// Edge between outcomes, as outcome-local indices.
struct MotifEdge {
  std::size_t from = 0;
  std::size_t to = 0;

  auto operator<=>(const MotifEdge&) const = default;
};

struct Motif {
  std::vector<MotifEdge> directed;    // sorted
  std::vector<MotifEdge> undirected;  // sorted, from < to
  double threshold = 0.01;
  bool standardized = true;

  bool operator==(const Motif&) const = default;
};

struct MotifOptions {
  double threshold = 0.01;
  /// Compare |B(child, parent) * sd(parent) / sd(child)| instead of raw
  /// coefficients.
  bool standardized = true;
};

/// Edge i -> j is present at t iff |B_within[t](j, i)| > threshold. A pair
/// adjacent at every fitted time point becomes a directed motif edge when
/// its direction never changes and an undirected one otherwise.
/// Throws Error(InvalidArgument) with fewer than two fitted time points or a
/// negative threshold.
Motif extract_motif(const LongitudinalModel& model, const MotifOptions& options = {});

/// Graphviz rendering with outcome names as node labels.
std::string motif_to_dot(const Motif& motif, const PanelSchema& schema);

}  // namespace wlingam
