#include "wlingam/motif.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wlingam/error.hpp"

namespace wlingam {

Motif extract_motif(const LongitudinalModel& model, const MotifOptions& options) {
  const std::size_t T = model.time_points();
  if (T < 3) throw Error(ErrorCode::InvalidArgument, "motif extraction needs at least two fitted time points");
  if (!(options.threshold >= 0.0)) throw Error(ErrorCode::InvalidArgument, "edge threshold must be non-negative");

  const auto outcomes = model.schema.outcomes();
  const std::size_t p = outcomes.size();

  auto present = [&](std::size_t t, std::size_t from, std::size_t to) {
    double b = model.B_within[t](static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from));
    if (options.standardized) {
      const double sd_from = model.scales[t](static_cast<Eigen::Index>(outcomes[from]));
      const double sd_to = model.scales[t](static_cast<Eigen::Index>(outcomes[to]));
      b = sd_to > 0.0 ? b * sd_from / sd_to : 0.0;
    }
    return std::abs(b) > options.threshold;
  };

  Motif motif;
  motif.threshold = options.threshold;
  motif.standardized = options.standardized;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      bool always_adjacent = true;
      bool always_forward = true;
      bool always_backward = true;
      for (std::size_t t = 1; t < T; ++t) {
        const bool fwd = present(t, i, j);
        const bool bwd = present(t, j, i);
        if (!fwd && !bwd) {
          always_adjacent = false;
          break;
        }
        always_forward = always_forward && fwd;
        always_backward = always_backward && bwd;
      }
      if (!always_adjacent) continue;
      if (always_forward && !always_backward) {
        motif.directed.push_back({i, j});
      } else if (always_backward && !always_forward) {
        motif.directed.push_back({j, i});
      } else {
        motif.undirected.push_back({i, j});
      }
    }
  }
  std::sort(motif.directed.begin(), motif.directed.end());
  return motif;
}

std::string motif_to_dot(const Motif& motif, const PanelSchema& schema) {
  const auto outcomes = schema.outcomes();
  auto name = [&](std::size_t i) { return "\"" + schema.variable(outcomes.at(i)).name + "\""; };
  std::ostringstream out;
  out << "digraph motif {\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) out << "  " << name(i) << ";\n";
  for (const auto& e : motif.directed) out << "  " << name(e.from) << " -> " << name(e.to) << ";\n";
  for (const auto& e : motif.undirected) {
    out << "  " << name(e.from) << " -> " << name(e.to) << " [dir=none];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace wlingam
