#include "wlingam/effects.hpp"

#include <functional>
#include <map>
#include <queue>
#include <string>

#include "wlingam/error.hpp"

namespace wlingam {

namespace {

std::vector<std::size_t> topological_sort(const Eigen::MatrixXd& A) {
  const auto N = static_cast<std::size_t>(A.rows());
  std::vector<std::size_t> indegree(N, 0);
  for (std::size_t c = 0; c < N; ++c) {
    for (std::size_t p = 0; p < N; ++p) {
      if (A(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p)) != 0.0) ++indegree[c];
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < N; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(N);
  while (!ready.empty()) {
    const std::size_t p = ready.top();
    ready.pop();
    order.push_back(p);
    for (std::size_t c = 0; c < N; ++c) {
      if (A(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p)) != 0.0 && --indegree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != N) throw Error(ErrorCode::NonAdmissibleModel, "stacked system has a directed cycle");
  return order;
}

}  // namespace

StackedSystem::StackedSystem(Eigen::MatrixXd A, std::vector<Node> nodes)
    : A_(std::move(A)), nodes_(std::move(nodes)), topo_(topological_sort(A_)) {}

StackedSystem StackedSystem::from_matrix(Eigen::MatrixXd A) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::DimensionMismatch, "coefficient matrix must be square");
  std::vector<Node> nodes;
  for (Eigen::Index i = 0; i < A.rows(); ++i) nodes.push_back({static_cast<std::size_t>(i), 0});
  return StackedSystem(std::move(A), std::move(nodes));
}

StackedSystem StackedSystem::build(const LongitudinalModel& model, bool include_auxiliary) {
  if (include_auxiliary && !model.auxiliary) {
    throw Error(ErrorCode::MissingAuxiliary, "model artifact has no auxiliary equations");
  }
  const PanelSchema& schema = model.schema;
  const auto outcomes = schema.outcomes();
  const auto exogenous = schema.exogenous();
  const std::size_t v = schema.intervention();
  const auto w = schema.baseline();
  const std::size_t T = schema.time_points();

  std::vector<Node> nodes;
  for (std::size_t x : outcomes) nodes.push_back({x, 0});
  for (std::size_t z : exogenous) nodes.push_back({z, 0});
  if (w) nodes.push_back({*w, 0});
  for (std::size_t t = 1; t < T; ++t) {
    nodes.push_back({v, t});
    for (std::size_t z : exogenous) nodes.push_back({z, t});
    for (std::size_t x : outcomes) nodes.push_back({x, t});
  }
  std::map<Node, Eigen::Index> at;
  for (std::size_t i = 0; i < nodes.size(); ++i) at[nodes[i]] = static_cast<Eigen::Index>(i);

  const auto N = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  const std::size_t p = outcomes.size();
  const std::size_t q = exogenous.size();
  auto idx = [](std::size_t i) { return static_cast<Eigen::Index>(i); };

  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t i = 0; i < p; ++i) {
      const Eigen::Index row = at[{outcomes[i], t}];
      A(row, at[{v, t}]) = model.alpha[t](idx(i));
      for (std::size_t j = 0; j < p; ++j) {
        if (j != i) A(row, at[{outcomes[j], t}]) = model.B_within[t](idx(i), idx(j));
        A(row, at[{outcomes[j], t - 1}]) = model.B_cross[t](idx(i), idx(j));
      }
      for (std::size_t k = 0; k < q; ++k) {
        A(row, at[{exogenous[k], t}]) = model.C_within[t](idx(i), idx(k));
        A(row, at[{exogenous[k], t - 1}]) = model.C_cross[t](idx(i), idx(k));
      }
      if (t == 1 && w) A(row, at[{*w, 0}]) = model.delta(idx(i));
    }
    if (!include_auxiliary) continue;
    const AuxiliaryEquations& aux = *model.auxiliary;
    for (std::size_t k = 0; k < q; ++k) {
      const Eigen::Index row = at[{exogenous[k], t}];
      A(row, at[{v, t}]) = aux.v_within[t](idx(k));
      if (t >= 2) A(row, at[{v, t - 1}]) = aux.v_cross[t](idx(k));
      for (std::size_t l = 0; l < q; ++l) {
        if (l != k) A(row, at[{exogenous[l], t}]) = aux.z_within[t](idx(k), idx(l));
        A(row, at[{exogenous[l], t - 1}]) = aux.z_cross[t](idx(k), idx(l));
      }
      for (std::size_t j = 0; j < p; ++j) A(row, at[{outcomes[j], t - 1}]) = aux.x_cross[t](idx(k), idx(j));
      if (t == 1 && w) A(row, at[{*w, 0}]) = aux.w(idx(k));
    }
  }
  return StackedSystem(std::move(A), std::move(nodes));
}

std::optional<std::size_t> StackedSystem::find(Node node) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i] == node) return i;
  }
  return std::nullopt;
}

std::size_t StackedSystem::index(Node node) const {
  if (auto i = find(node)) return *i;
  throw Error(ErrorCode::OutOfRange, "no node for variable " + std::to_string(node.var) + " at time " +
                                         std::to_string(node.time));
}

Eigen::VectorXd StackedSystem::effects_from(std::size_t source) const {
  const auto N = A_.rows();
  if (source >= size()) throw Error(ErrorCode::OutOfRange, "source node out of range");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
  e(static_cast<Eigen::Index>(source)) = 1.0;
  bool started = false;
  for (std::size_t node : topo_) {
    if (node == source) {
      started = true;
      continue;
    }
    if (!started) continue;
    const auto r = static_cast<Eigen::Index>(node);
    double acc = 0.0;
    for (Eigen::Index c = 0; c < N; ++c) {
      const double a = A_(r, c);
      if (a != 0.0) acc += a * e(c);
    }
    e(r) = acc;
  }
  return e;
}

TotalEffect total_effect(const StackedSystem& sys, std::size_t source, std::size_t target) {
  if (target >= sys.size()) throw Error(ErrorCode::OutOfRange, "target node out of range");
  const Eigen::VectorXd e = sys.effects_from(source);
  const Node s = sys.nodes()[source];
  const Node t = sys.nodes()[target];
  return {s, t, static_cast<std::ptrdiff_t>(t.time) - static_cast<std::ptrdiff_t>(s.time),
          e(static_cast<Eigen::Index>(target))};
}

TotalEffect total_effect(const StackedSystem& sys, Node source, Node target) {
  return total_effect(sys, sys.index(source), sys.index(target));
}

double oracle_total_effect(const StackedSystem& sys, std::size_t source, std::size_t target) {
  const std::size_t N = sys.size();
  if (N > 16) {
    throw Error(ErrorCode::OracleTooLarge, "path enumeration limited to 16 nodes, got " + std::to_string(N));
  }
  if (source >= N || target >= N) throw Error(ErrorCode::OutOfRange, "node out of range");
  const Eigen::MatrixXd& A = sys.matrix();
  double total = 0.0;
  std::function<void(std::size_t, double)> walk = [&](std::size_t node, double product) {
    if (node == target) {
      total += product;
      return;
    }
    for (std::size_t c = 0; c < N; ++c) {
      const double a = A(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(node));
      if (a != 0.0) walk(c, product * a);
    }
  };
  walk(source, 1.0);
  return total;
}

Eigen::MatrixXd neumann_inverse(const Eigen::MatrixXd& A) {
  const auto N = A.rows();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(N, N);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(N, N);
  for (Eigen::Index k = 1; k <= N; ++k) {
    power = power * A;
    sum += power;
  }
  return sum;
}

Eigen::MatrixXd guidance_effect_table(const StackedSystem& sys, const PanelSchema& schema, std::size_t anchor,
                                      const std::vector<std::size_t>& horizons) {
  const std::size_t T = schema.time_points();
  for (std::size_t h : horizons) {
    if (anchor + h >= T) {
      throw Error(ErrorCode::HorizonOutOfRange,
                  "horizon " + std::to_string(h) + " from anchor time " + std::to_string(anchor) +
                      " exceeds the last time point " + std::to_string(T - 1));
    }
  }
  const auto source = sys.find({schema.intervention(), anchor});
  if (!source) {
    throw Error(ErrorCode::OutOfRange, "no intervention node at time " + std::to_string(anchor));
  }
  const Eigen::VectorXd e = sys.effects_from(*source);
  const auto outcomes = schema.outcomes();
  Eigen::MatrixXd table(static_cast<Eigen::Index>(outcomes.size()), static_cast<Eigen::Index>(horizons.size()));
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h)) =
          e(static_cast<Eigen::Index>(sys.index({outcomes[i], anchor + horizons[h]})));
    }
  }
  return table;
}

}  // namespace wlingam
