#include "wlingam/ols.hpp"

#include <cmath>
#include <string>

#include "wlingam/error.hpp"

namespace wlingam {

namespace {

constexpr double kRankThreshold = 1e-9;

// Centers and scales columns to unit norm; zero-norm columns keep scale 1.
void normalize(const Eigen::MatrixXd& X, Eigen::MatrixXd& out, Eigen::RowVectorXd& means,
               Eigen::RowVectorXd& norms) {
  means = X.colwise().mean();
  out = X.rowwise() - means;
  norms = out.colwise().norm();
  for (Eigen::Index j = 0; j < norms.size(); ++j) {
    if (norms(j) > 0.0) out.col(j) /= norms(j);
  }
}

Eigen::Index rank_of(const Eigen::MatrixXd& scaled) {
  if (scaled.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(kRankThreshold);
  return qr.rank();
}

}  // namespace

std::vector<Eigen::Index> dependent_columns(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd scaled;
  Eigen::RowVectorXd means, norms;
  normalize(X, scaled, means, norms);
  std::vector<Eigen::Index> out;
  if (rank_of(scaled) == scaled.cols()) return out;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    kept.push_back(j);
    Eigen::MatrixXd sub(scaled.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = scaled.col(kept[k]);
    if (rank_of(sub) < sub.cols()) {
      out.push_back(j);
      kept.pop_back();
    }
  }
  return out;
}

LeastSquares::LeastSquares(const Eigen::MatrixXd& X) {
  if (X.rows() < X.cols() + 1) {
    throw Error(ErrorCode::RankDeficient, "fewer rows (" + std::to_string(X.rows()) +
                                              ") than parameters (" + std::to_string(X.cols() + 1) + ")");
  }
  if (X.cols() > 0) {
    auto dependent = dependent_columns(X);
    if (!dependent.empty()) {
      std::string cols;
      for (auto j : dependent) cols += (cols.empty() ? "" : ",") + std::to_string(j);
      throw Error(ErrorCode::RankDeficient, "dependent design columns: " + cols);
    }
  }
  means_ = X.colwise().mean();
  centered_ = X.rowwise() - means_;
  qr_.compute(centered_);
}

LeastSquares::Solution LeastSquares::solve(const Eigen::VectorXd& y) const {
  Solution s;
  const double ybar = y.mean();
  Eigen::VectorXd yc = y.array() - ybar;
  if (centered_.cols() == 0) {
    s.coef = Eigen::VectorXd(0);
    s.intercept = ybar;
    s.residuals = yc;
    return s;
  }
  s.coef = qr_.solve(yc);
  s.intercept = ybar - means_.dot(s.coef);
  s.residuals = yc - centered_ * s.coef;
  return s;
}

Eigen::VectorXd residualize(const Eigen::VectorXd& y, const Eigen::MatrixXd& covariates) {
  if (covariates.cols() > 0 && covariates.rows() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "covariate rows do not match response length");
  }
  Eigen::MatrixXd X = covariates.cols() == 0 ? Eigen::MatrixXd(y.size(), 0) : covariates;
  return LeastSquares(X).solve(y).residuals;
}

bool is_constant(const Eigen::Ref<const Eigen::VectorXd>& column) {
  if (column.size() == 0) return true;
  return (column.array() == column(0)).all();
}

double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() < 2) return 0.0;
  const double m = x.mean();
  return std::sqrt((x.array() - m).square().sum() / static_cast<double>(x.size() - 1));
}

}  // namespace wlingam
