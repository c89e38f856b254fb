#include "wlingam/mask.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "wlingam/error.hpp"

namespace wlingam {

std::string_view to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::Intervention: return "intervention";
    case BlockKind::Background: return "background";
    case BlockKind::Covariate: return "covariate";
    case BlockKind::Outcome: return "outcome";
    case BlockKind::Baseline: return "baseline";
  }
  return "covariate";
}

BlockKind block_kind_from_string(std::string_view s) {
  if (s == "intervention") return BlockKind::Intervention;
  if (s == "background") return BlockKind::Background;
  if (s == "covariate") return BlockKind::Covariate;
  if (s == "outcome") return BlockKind::Outcome;
  if (s == "baseline") return BlockKind::Baseline;
  throw Error(ErrorCode::Parse, "unknown block kind '" + std::string(s) + "'");
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::ValueOutOfDomain: return "ValueOutOfDomain";
    case ViolationKind::SelfLoop: return "SelfLoop";
    case ViolationKind::RequiredEdgesCyclic: return "RequiredEdgesCyclic";
    case ViolationKind::NoInstantaneousParentsOfIntervention:
      return "NoInstantaneousParentsOfIntervention";
    case ViolationKind::CrossLagBeyondOne: return "CrossLagBeyondOne";
    case ViolationKind::CrossLagZeroSlotUsed: return "CrossLagZeroSlotUsed";
    case ViolationKind::EdgeIntoBaselineOnly: return "EdgeIntoBaselineOnly";
    case ViolationKind::BaselineOnlyNotIsolated: return "BaselineOnlyNotIsolated";
    case ViolationKind::WithinTimeAtTimeZero: return "WithinTimeAtTimeZero";
  }
  return "Unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

PKMask PKMask::forbidden(std::size_t variables, std::size_t time_points) {
  PKMask m;
  m.variables = variables;
  m.time_points = time_points;
  const auto V = static_cast<Eigen::Index>(variables);
  m.within.assign(time_points, IntMatrix::Zero(V, V));
  m.cross.assign(time_points, std::vector<IntMatrix>(time_points, IntMatrix::Zero(V, V)));
  return m;
}

bool PKMask::operator==(const PKMask& other) const {
  return variables == other.variables && time_points == other.time_points &&
         within == other.within && cross == other.cross;
}

BlockOrder default_block_order(const PanelSchema& schema) {
  BlockOrder order;
  order.tiers.resize(3);
  order.tiers[0].push_back({"intervention", BlockKind::Intervention, {schema.intervention()}});

  std::vector<std::size_t> background;
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t v : schema.exogenous()) {
    const std::string& g = schema.variable(v).group;
    if (g == "background") {
      background.push_back(v);
      continue;
    }
    const std::string key = g.empty() ? "exogenous" : g;
    if (!groups.count(key)) group_order.push_back(key);
    groups[key].push_back(v);
  }
  if (!background.empty()) order.tiers[0].push_back({"background", BlockKind::Background, background});
  if (auto w = schema.baseline()) order.tiers[0].push_back({"baseline", BlockKind::Baseline, {*w}});
  for (const auto& key : group_order) {
    order.tiers[1].push_back({key, BlockKind::Covariate, groups[key]});
  }
  if (order.tiers[1].empty()) order.tiers.erase(order.tiers.begin() + 1);
  order.tiers.back().push_back({"outcome", BlockKind::Outcome, schema.outcomes()});
  return order;
}

namespace {

struct Placement {
  std::size_t tier = 0;
  std::size_t block = 0;  // global block id
  BlockKind kind = BlockKind::Covariate;
};

std::vector<Placement> place_variables(const PanelSchema& schema, const BlockOrder& blocks) {
  const std::size_t V = schema.size();
  std::vector<std::optional<Placement>> where(V);
  std::size_t block_id = 0;
  std::size_t last_tier_with_outcome = 0;
  bool outcome_seen = false;
  for (std::size_t tier = 0; tier < blocks.tiers.size(); ++tier) {
    for (const Block& b : blocks.tiers[tier]) {
      for (std::size_t v : b.members) {
        if (v >= V) {
          throw Error(ErrorCode::BlockOrderInconsistent,
                      "block '" + b.name + "' references variable index " + std::to_string(v));
        }
        if (where[v]) {
          throw Error(ErrorCode::BlockOrderInconsistent,
                      "variable '" + schema.variable(v).name + "' appears in more than one block");
        }
        const Role role = schema.variable(v).role;
        const bool ok = (b.kind == BlockKind::Intervention && role == Role::Intervention) ||
                        (b.kind == BlockKind::Outcome && role == Role::Outcome) ||
                        (b.kind == BlockKind::Baseline && role == Role::BaselineOnly) ||
                        ((b.kind == BlockKind::Background || b.kind == BlockKind::Covariate) &&
                         role == Role::Exogenous);
        if (!ok) {
          throw Error(ErrorCode::BlockOrderInconsistent,
                      "variable '" + schema.variable(v).name + "' with role " +
                          std::string(to_string(role)) + " placed in " +
                          std::string(to_string(b.kind)) + " block '" + b.name + "'");
        }
        where[v] = Placement{tier, block_id, b.kind};
      }
      if (b.kind == BlockKind::Outcome) {
        if (outcome_seen) {
          throw Error(ErrorCode::BlockOrderInconsistent, "outcomes must form a single block");
        }
        outcome_seen = true;
        last_tier_with_outcome = tier;
      }
      ++block_id;
    }
  }
  std::vector<Placement> out;
  out.reserve(V);
  for (std::size_t v = 0; v < V; ++v) {
    if (!where[v]) {
      throw Error(ErrorCode::BlockOrderInconsistent,
                  "variable '" + schema.variable(v).name + "' is not covered by any block");
    }
    out.push_back(*where[v]);
  }
  if (out[schema.intervention()].tier != 0) {
    throw Error(ErrorCode::BlockOrderInconsistent, "the intervention block must be in the first tier");
  }
  if (outcome_seen && last_tier_with_outcome + 1 != blocks.tiers.size()) {
    throw Error(ErrorCode::BlockOrderInconsistent, "the outcome block must be in the last tier");
  }
  return out;
}

}  // namespace

PKMask build_default_mask(const PanelSchema& schema, const BlockOrder& blocks) {
  const std::size_t V = schema.size();
  const std::size_t T = schema.time_points();
  const auto place = place_variables(schema, blocks);
  PKMask mask = PKMask::forbidden(V, T);

  auto role = [&](std::size_t v) { return schema.variable(v).role; };

  for (std::size_t t = 1; t < T; ++t) {
    IntMatrix& w = mask.within[t];
    for (std::size_t child = 0; child < V; ++child) {
      for (std::size_t parent = 0; parent < V; ++parent) {
        if (child == parent) continue;
        if (role(child) == Role::BaselineOnly || role(parent) == Role::BaselineOnly) continue;
        if (role(child) == Role::Intervention) continue;
        const Placement& pc = place[child];
        const Placement& pp = place[parent];
        int value = mark::kForbidden;
        if (pp.tier < pc.tier) {
          value = mark::kUnknown;
        } else if (pp.tier == pc.tier && pp.block == pc.block && pc.kind == BlockKind::Outcome) {
          value = mark::kUnknown;
        }
        w(static_cast<Eigen::Index>(child), static_cast<Eigen::Index>(parent)) = value;
      }
    }

    IntMatrix& c = mask.cross[t][1];
    for (std::size_t child = 0; child < V; ++child) {
      if (role(child) == Role::BaselineOnly) continue;
      for (std::size_t parent = 0; parent < V; ++parent) {
        int value = mark::kRequired;
        if (role(parent) == Role::BaselineOnly) {
          value = (t == 1) ? mark::kRequired : mark::kForbidden;
        } else if (role(parent) == Role::Intervention) {
          // the t = 0 intervention is a layout placeholder
          if (t == 1 || role(child) == Role::Outcome) value = mark::kForbidden;
        }
        if ((place[child].kind == BlockKind::Background || place[parent].kind == BlockKind::Background) &&
            child != parent) {
          value = mark::kForbidden;
        }
        c(static_cast<Eigen::Index>(child), static_cast<Eigen::Index>(parent)) = value;
      }
    }
  }
  return mask;
}

PKMask build_default_mask(const PanelSchema& schema) {
  return build_default_mask(schema, default_block_order(schema));
}

bool required_edges_cyclic(const IntMatrix& within) {
  const auto V = within.rows();
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(static_cast<std::size_t>(V), 0);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> stack;
  for (Eigen::Index root = 0; root < V; ++root) {
    if (state[static_cast<std::size_t>(root)] != 0) continue;
    stack.emplace_back(root, 0);
    state[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      // successors of `node` are children c with within(c, node) == required
      bool pushed = false;
      while (next < V) {
        const Eigen::Index child = next++;
        if (within(child, node) != mark::kRequired) continue;
        const int s = state[static_cast<std::size_t>(child)];
        if (s == 1) return true;
        if (s == 0) {
          state[static_cast<std::size_t>(child)] = 1;
          stack.emplace_back(child, 0);
          pushed = true;
          break;
        }
      }
      if (!pushed) {
        state[static_cast<std::size_t>(stack.back().first)] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

bool admits(const IntMatrix& within, const IntMatrix& adjacency) {
  if (within.rows() != adjacency.rows() || within.cols() != adjacency.cols()) return false;
  for (Eigen::Index i = 0; i < within.rows(); ++i) {
    for (Eigen::Index j = 0; j < within.cols(); ++j) {
      const bool edge = adjacency(i, j) != 0;
      if (edge && within(i, j) == mark::kForbidden) return false;
      if (!edge && within(i, j) == mark::kRequired) return false;
    }
  }
  return true;
}

ValidationReport validate_mask(const PKMask& mask, const PanelSchema& schema) {
  const std::size_t V = schema.size();
  const std::size_t T = schema.time_points();
  const auto Vi = static_cast<Eigen::Index>(V);
  if (mask.variables != V || mask.time_points != T || mask.within.size() != T || mask.cross.size() != T) {
    throw Error(ErrorCode::DimensionMismatch, "mask dimensions do not match schema");
  }
  for (std::size_t t = 0; t < T; ++t) {
    if (mask.within[t].rows() != Vi || mask.within[t].cols() != Vi || mask.cross[t].size() != T) {
      throw Error(ErrorCode::DimensionMismatch, "mask dimensions do not match schema");
    }
    for (const auto& m : mask.cross[t]) {
      if (m.rows() != Vi || m.cols() != Vi) {
        throw Error(ErrorCode::DimensionMismatch, "mask dimensions do not match schema");
      }
    }
  }

  ValidationReport report;
  auto add = [&](ViolationKind kind, std::size_t t, std::size_t lag, std::size_t child,
                 std::size_t parent) {
    std::string detail = std::string(to_string(kind)) + " at t=" + std::to_string(t);
    if (lag > 0) detail += " lag=" + std::to_string(lag);
    detail += " (" + schema.variable(parent).name + " -> " + schema.variable(child).name + ")";
    report.violations.push_back({kind, t, lag, child, parent, std::move(detail)});
  };

  const std::size_t v_idx = schema.intervention();
  const auto w_idx = schema.baseline();

  for (std::size_t t = 0; t < T; ++t) {
    const IntMatrix& w = mask.within[t];
    for (std::size_t i = 0; i < V; ++i) {
      for (std::size_t j = 0; j < V; ++j) {
        const int e = mask.within_at(t, i, j);
        if (e < -1 || e > 1) {
          add(ViolationKind::ValueOutOfDomain, t, 0, i, j);
          continue;
        }
        if (i == j) {
          if (e != 0) add(ViolationKind::SelfLoop, t, 0, i, j);
          continue;
        }
        if (e == 0) continue;
        if (t == 0) add(ViolationKind::WithinTimeAtTimeZero, t, 0, i, j);
        if (i == v_idx) add(ViolationKind::NoInstantaneousParentsOfIntervention, t, 0, i, j);
        if (w_idx && (i == *w_idx || j == *w_idx)) {
          add(i == *w_idx ? ViolationKind::EdgeIntoBaselineOnly : ViolationKind::BaselineOnlyNotIsolated,
              t, 0, i, j);
        }
      }
    }
    if (required_edges_cyclic(w)) {
      report.violations.push_back({ViolationKind::RequiredEdgesCyclic, t, 0, 0, 0,
                                   "required within-time edges form a cycle at t=" + std::to_string(t)});
    }

    for (std::size_t lag = 0; lag < T; ++lag) {
      for (std::size_t i = 0; i < V; ++i) {
        for (std::size_t j = 0; j < V; ++j) {
          const int e = mask.cross_at(t, lag, i, j);
          if (e != 0 && e != 1) {
            add(ViolationKind::ValueOutOfDomain, t, lag, i, j);
            continue;
          }
          if (e == 0) continue;
          if (lag == 0) {
            add(ViolationKind::CrossLagZeroSlotUsed, t, lag, i, j);
          } else if (lag >= 2 || lag > t) {
            add(ViolationKind::CrossLagBeyondOne, t, lag, i, j);
          }
          if (w_idx && i == *w_idx && t > 0) add(ViolationKind::EdgeIntoBaselineOnly, t, lag, i, j);
          if (w_idx && j == *w_idx && t - lag > 0) {
            add(ViolationKind::BaselineOnlyNotIsolated, t, lag, i, j);
          }
        }
      }
    }
  }
  return report;
}

EdgeCounts admissible_edge_count(const PKMask& mask) {
  EdgeCounts c;
  for (std::size_t t = 0; t < mask.within.size(); ++t) {
    const IntMatrix& w = mask.within[t];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        if (i == j) continue;
        if (w(i, j) == mark::kUnknown) ++c.within_unknown;
        if (w(i, j) == mark::kRequired) ++c.within_required;
      }
    }
    for (const IntMatrix& m : mask.cross[t]) c.cross_allowed += static_cast<std::size_t>((m.array() == 1).count());
  }
  return c;
}

}  // namespace wlingam
