#include "wlingam/model.hpp"

#include "wlingam/error.hpp"

namespace wlingam {

LongitudinalModel LongitudinalModel::zero(const PanelSchema& schema) {
  LongitudinalModel m{.schema = schema};
  const auto p = static_cast<Eigen::Index>(m.p());
  const auto q = static_cast<Eigen::Index>(m.q());
  const auto V = static_cast<Eigen::Index>(schema.size());
  const std::size_t T = schema.time_points();
  for (std::size_t t = 0; t < T; ++t) {
    const Eigen::Index pp = t == 0 ? 0 : p;
    m.alpha.push_back(Eigen::VectorXd::Zero(pp));
    m.B_within.push_back(Eigen::MatrixXd::Zero(pp, pp));
    m.B_cross.push_back(Eigen::MatrixXd::Zero(pp, pp));
    m.C_within.push_back(Eigen::MatrixXd::Zero(pp, t == 0 ? 0 : q));
    m.C_cross.push_back(Eigen::MatrixXd::Zero(pp, t == 0 ? 0 : q));
    m.intercepts.push_back(Eigen::VectorXd::Zero(pp));
    std::vector<std::size_t> order;
    for (Eigen::Index i = 0; i < pp; ++i) order.push_back(static_cast<std::size_t>(i));
    m.ordering.push_back(order);
    m.residual_variance.push_back(Eigen::VectorXd::Zero(pp));
    m.scales.push_back(Eigen::VectorXd::Ones(V));
  }
  m.delta = Eigen::VectorXd::Zero(p);
  return m;
}

Eigen::VectorXd predict_one_step(const LongitudinalModel& model, const Eigen::VectorXd& x_prev, double v,
                                 const Eigen::VectorXd& z, const Eigen::VectorXd& z_prev,
                                 std::optional<double> w, std::size_t t) {
  const auto p = static_cast<Eigen::Index>(model.p());
  const auto q = static_cast<Eigen::Index>(model.q());
  if (t < 1 || t >= model.time_points()) {
    throw Error(ErrorCode::OutOfRange, "prediction time " + std::to_string(t) + " out of range");
  }
  if (x_prev.size() != p || z.size() != q || z_prev.size() != q) {
    throw Error(ErrorCode::DimensionMismatch, "prediction inputs do not match model dimensions");
  }
  const bool needs_w = t == 1 && model.schema.baseline().has_value();
  if (w.has_value() != needs_w) {
    throw Error(ErrorCode::InvalidArgument, "baseline value must be supplied exactly at t=1");
  }
  Eigen::VectorXd rhs = model.intercepts[t] + model.alpha[t] * v + model.B_cross[t] * x_prev +
                        model.C_within[t] * z + model.C_cross[t] * z_prev;
  if (w) rhs += model.delta * *w;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
  for (std::size_t i : model.ordering[t]) {
    const auto c = static_cast<Eigen::Index>(i);
    x(c) = rhs(c) + model.B_within[t].row(c).dot(x);
  }
  return x;
}

}  // namespace wlingam
