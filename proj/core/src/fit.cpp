#include "wlingam/fit.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "wlingam/discovery.hpp"
#include "wlingam/error.hpp"
#include "wlingam/hash.hpp"
#include "wlingam/ols.hpp"
#include "wlingam/serialize.hpp"

namespace wlingam {

namespace {

enum class Slot { VNow, ZNow, ZPrev, XPrev, VPrev, W0, XNow };

// One regressor column: a variable observed at t (Now), t-1 (Prev) or 0.
struct Column {
  Slot slot;
  std::size_t local = 0;  // index inside its role group
  std::size_t var = 0;    // schema index

  auto operator<=>(const Column&) const = default;
};

std::string column_label(const PanelSchema& schema, const Column& c) {
  const std::string& name = schema.variable(c.var).name;
  switch (c.slot) {
    case Slot::VNow:
    case Slot::ZNow:
    case Slot::XNow: return name + "(t)";
    case Slot::ZPrev:
    case Slot::XPrev:
    case Slot::VPrev: return name + "(t-1)";
    case Slot::W0: return name + "(0)";
  }
  return name;
}

struct Slices {
  const Eigen::MatrixXd& now;
  const Eigen::MatrixXd& prev;
  const Eigen::MatrixXd& first;
};

Eigen::Ref<const Eigen::VectorXd> column_data(const Slices& s, const Column& c) {
  const auto v = static_cast<Eigen::Index>(c.var);
  switch (c.slot) {
    case Slot::VNow:
    case Slot::ZNow:
    case Slot::XNow: return s.now.col(v);
    case Slot::ZPrev:
    case Slot::XPrev:
    case Slot::VPrev: return s.prev.col(v);
    case Slot::W0: return s.first.col(v);
  }
  return s.now.col(v);
}

Eigen::MatrixXd design(const Slices& s, const std::vector<Column>& cols, Eigen::Index n) {
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) X.col(static_cast<Eigen::Index>(k)) = column_data(s, cols[k]);
  return X;
}

LeastSquares factor(const PanelSchema& schema, const Eigen::MatrixXd& X, const std::vector<Column>& cols,
                    std::size_t t, const std::string& equation) {
  try {
    return LeastSquares(X);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankDeficient) throw;
    std::string names;
    for (auto j : dependent_columns(X)) {
      names += (names.empty() ? "" : ", ") + column_label(schema, cols[static_cast<std::size_t>(j)]);
    }
    if (names.empty()) names = e.message();
    throw Error(ErrorCode::RankDeficient,
                "equation " + equation + " at t=" + std::to_string(t) + ": collinear columns " + names);
  }
}

// Drops constant columns, recording audit flags.
std::vector<Column> drop_degenerate(const PanelSchema& schema, const Slices& s, std::vector<Column> cols,
                                    std::size_t t, const std::string& equation, std::vector<AuditFlag>& audit) {
  std::vector<Column> kept;
  for (const auto& c : cols) {
    if (is_constant(column_data(s, c))) {
      audit.push_back({t, equation, column_label(schema, c), "DegenerateColumn"});
    } else {
      kept.push_back(c);
    }
  }
  return kept;
}

class Fitter {
 public:
  Fitter(const Panel& panel, const PKMask& mask)
      : panel_(panel), schema_(panel.schema()), mask_(mask),
        outcomes_(schema_.outcomes()), exogenous_(schema_.exogenous()),
        v_(schema_.intervention()), w_(schema_.baseline()) {}

  int within(std::size_t t, std::size_t child, std::size_t parent) const {
    return mask_.within_at(t, child, parent);
  }
  int lag1(std::size_t t, std::size_t child, std::size_t parent) const {
    return mask_.cross_at(t, 1, child, parent);
  }

  // Admissible adjustment columns for the equation of `child` at time t,
  // excluding within-time parents from the child's own role group.
  std::vector<Column> adjustment(std::size_t t, std::size_t child) const {
    std::vector<Column> cols;
    if (within(t, child, v_) != mark::kForbidden) cols.push_back({Slot::VNow, 0, v_});
    for (std::size_t k = 0; k < exogenous_.size(); ++k) {
      if (exogenous_[k] != child && within(t, child, exogenous_[k]) != mark::kForbidden) {
        cols.push_back({Slot::ZNow, k, exogenous_[k]});
      }
    }
    for (std::size_t k = 0; k < exogenous_.size(); ++k) {
      if (lag1(t, child, exogenous_[k]) == 1) cols.push_back({Slot::ZPrev, k, exogenous_[k]});
    }
    for (std::size_t j = 0; j < outcomes_.size(); ++j) {
      if (lag1(t, child, outcomes_[j]) == 1) cols.push_back({Slot::XPrev, j, outcomes_[j]});
    }
    if (t == 1 && w_ && lag1(t, child, *w_) == 1) cols.push_back({Slot::W0, 0, *w_});
    return cols;
  }

  Slices slices(std::size_t t) const {
    return {panel_.slice_time(t), panel_.slice_time(t - 1), panel_.slice_time(0)};
  }

  void fit_outcomes(std::size_t t, LongitudinalModel& m) const {
    const Slices s = slices(t);
    const Eigen::Index n = s.now.rows();
    const std::size_t p = outcomes_.size();

    std::vector<std::vector<Column>> adj(p);
    for (std::size_t i = 0; i < p; ++i) {
      const std::string& eq = schema_.variable(outcomes_[i]).name;
      adj[i] = drop_degenerate(schema_, s, adjustment(t, outcomes_[i]), t, eq, m.audit);
    }

    // residualize, sharing one factorization per distinct regressor set
    Eigen::MatrixXd R(n, static_cast<Eigen::Index>(p));
    std::map<std::vector<Column>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < p; ++i) groups[adj[i]].push_back(i);
    for (const auto& [cols, members] : groups) {
      const Eigen::MatrixXd X = design(s, cols, n);
      const LeastSquares ls = factor(schema_, X, cols, t, schema_.variable(outcomes_[members.front()]).name);
      for (std::size_t i : members) {
        R.col(static_cast<Eigen::Index>(i)) = ls.solve(s.now.col(static_cast<Eigen::Index>(outcomes_[i]))).residuals;
      }
    }

    IntMatrix W(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = within(t, outcomes_[i], outcomes_[j]);
      }
    }
    const WithinTimeFit wf = fit_within_time(R, W);
    m.ordering[t] = wf.order;

    for (std::size_t pos = 0; pos < p; ++pos) {
      const std::size_t i = wf.order[pos];
      const auto ri = static_cast<Eigen::Index>(i);
      const std::string& eq = schema_.variable(outcomes_[i]).name;
      std::vector<Column> cols;
      for (std::size_t q = 0; q < pos; ++q) {
        const std::size_t j = wf.order[q];
        if (W(ri, static_cast<Eigen::Index>(j)) != mark::kForbidden) cols.push_back({Slot::XNow, j, outcomes_[j]});
      }
      cols = drop_degenerate(schema_, s, cols, t, eq, m.audit);
      cols.insert(cols.end(), adj[i].begin(), adj[i].end());
      const Eigen::MatrixXd X = design(s, cols, n);
      const auto sol = factor(schema_, X, cols, t, eq).solve(s.now.col(static_cast<Eigen::Index>(outcomes_[i])));
      m.intercepts[t](ri) = sol.intercept;
      const double dof = static_cast<double>(std::max<Eigen::Index>(1, n - 1 - X.cols()));
      m.residual_variance[t](ri) = sol.residuals.squaredNorm() / dof;
      for (std::size_t k = 0; k < cols.size(); ++k) {
        const double b = sol.coef(static_cast<Eigen::Index>(k));
        const Column& c = cols[k];
        const auto l = static_cast<Eigen::Index>(c.local);
        switch (c.slot) {
          case Slot::VNow: m.alpha[t](ri) = b; break;
          case Slot::XNow: m.B_within[t](ri, l) = b; break;
          case Slot::XPrev: m.B_cross[t](ri, l) = b; break;
          case Slot::ZNow: m.C_within[t](ri, l) = b; break;
          case Slot::ZPrev: m.C_cross[t](ri, l) = b; break;
          case Slot::W0: m.delta(ri) = b; break;
          case Slot::VPrev: break;
        }
      }
    }
  }

  void fit_auxiliary(std::size_t t, AuxiliaryEquations& aux, std::vector<AuditFlag>& audit) const {
    const Slices s = slices(t);
    const Eigen::Index n = s.now.rows();
    const std::size_t q = exogenous_.size();
    for (std::size_t k = 0; k < q; ++k) {
      const std::size_t child = exogenous_[k];
      const std::string& eq = schema_.variable(child).name;
      std::vector<Column> cols = adjustment(t, child);
      if (t >= 2 && lag1(t, child, v_) == 1) cols.push_back({Slot::VPrev, 0, v_});
      cols = drop_degenerate(schema_, s, cols, t, eq, audit);
      const auto y = s.now.col(static_cast<Eigen::Index>(child));
      const auto kk = static_cast<Eigen::Index>(k);
      if (is_constant(y)) {
        aux.intercepts[t](kk) = y(0);
        continue;
      }
      const Eigen::MatrixXd X = design(s, cols, n);
      const auto sol = factor(schema_, X, cols, t, eq).solve(y);
      aux.intercepts[t](kk) = sol.intercept;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const double b = sol.coef(static_cast<Eigen::Index>(c));
        const auto l = static_cast<Eigen::Index>(cols[c].local);
        switch (cols[c].slot) {
          case Slot::VNow: aux.v_within[t](kk) = b; break;
          case Slot::VPrev: aux.v_cross[t](kk) = b; break;
          case Slot::ZNow: aux.z_within[t](kk, l) = b; break;
          case Slot::ZPrev: aux.z_cross[t](kk, l) = b; break;
          case Slot::XPrev: aux.x_cross[t](kk, l) = b; break;
          case Slot::W0: aux.w(kk) = b; break;
          case Slot::XNow: break;
        }
      }
    }
  }

  // The exogenous within-time graph must be acyclic for the auxiliary
  // equations to define a recursive system.
  void require_acyclic_exogenous() const {
    const auto q = static_cast<Eigen::Index>(exogenous_.size());
    for (std::size_t t = 1; t < schema_.time_points(); ++t) {
      IntMatrix nz = IntMatrix::Zero(q, q);
      for (Eigen::Index a = 0; a < q; ++a) {
        for (Eigen::Index b = 0; b < q; ++b) {
          if (a != b && within(t, exogenous_[static_cast<std::size_t>(a)], exogenous_[static_cast<std::size_t>(b)]) != 0) {
            nz(a, b) = mark::kRequired;
          }
        }
      }
      if (required_edges_cyclic(nz)) {
        throw Error(ErrorCode::MaskInfeasible,
                    "auxiliary equations need an acyclic exogenous within-time mask at t=" + std::to_string(t));
      }
    }
  }

 private:
  const Panel& panel_;
  const PanelSchema& schema_;
  const PKMask& mask_;
  std::vector<std::size_t> outcomes_;
  std::vector<std::size_t> exogenous_;
  std::size_t v_;
  std::optional<std::size_t> w_;
};

}  // namespace

std::string panel_hash(const Panel& panel) {
  std::string bytes;
  for (const auto& id : panel.subject_ids()) {
    bytes += id;
    bytes.push_back('\n');
  }
  for (std::size_t t = 0; t < panel.time_points(); ++t) {
    const Eigen::MatrixXd& s = panel.slice_time(t);
    bytes.append(reinterpret_cast<const char*>(s.data()), static_cast<std::size_t>(s.size()) * sizeof(double));
  }
  return sha256_hex(bytes);
}

LongitudinalModel fit(const Panel& panel, const PKMask& mask, const FitOptions& options) {
  const PanelSchema& schema = panel.schema();
  const ValidationReport report = validate_mask(mask, schema);
  if (!report.ok()) {
    throw Error(ErrorCode::InvalidArgument, "mask is not admissible: " + report.violations.front().detail);
  }
  Fitter fitter(panel, mask);
  if (options.auxiliary) fitter.require_acyclic_exogenous();

  LongitudinalModel m = LongitudinalModel::zero(schema);
  const std::size_t T = schema.time_points();
  for (std::size_t t = 0; t < T; ++t) {
    const Eigen::MatrixXd& s = panel.slice_time(t);
    for (Eigen::Index v = 0; v < s.cols(); ++v) m.scales[t](v) = sample_sd(s.col(v));
  }
  for (std::size_t t = 1; t < T; ++t) fitter.fit_outcomes(t, m);

  if (options.auxiliary) {
    const auto p = static_cast<Eigen::Index>(m.p());
    const auto q = static_cast<Eigen::Index>(m.q());
    AuxiliaryEquations aux;
    for (std::size_t t = 0; t < T; ++t) {
      const Eigen::Index qq = t == 0 ? 0 : q;
      aux.v_within.push_back(Eigen::VectorXd::Zero(qq));
      aux.v_cross.push_back(Eigen::VectorXd::Zero(qq));
      aux.z_within.push_back(Eigen::MatrixXd::Zero(qq, qq));
      aux.z_cross.push_back(Eigen::MatrixXd::Zero(qq, qq));
      aux.x_cross.push_back(Eigen::MatrixXd::Zero(qq, t == 0 ? 0 : p));
      aux.intercepts.push_back(Eigen::VectorXd::Zero(qq));
    }
    aux.w = Eigen::VectorXd::Zero(q);
    for (std::size_t t = 1; t < T; ++t) fitter.fit_auxiliary(t, aux, m.audit);
    m.auxiliary = std::move(aux);
  }

  if (options.provenance) {
    m.provenance.schema_hash = schema_hash(schema);
    m.provenance.mask_hash = mask_hash(mask, schema);
    m.provenance.panel_hash = panel_hash(panel);
  }
  return m;
}

}  // namespace wlingam
