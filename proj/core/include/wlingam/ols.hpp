#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace wlingam {

/// Least squares on [1, X] with X centered before factorization, so the
/// residual mean is zero to rounding. One factorization serves any number of
/// responses.
class LeastSquares {
 public:
  /// Throws Error(RankDeficient) listing the dependent column indices.
  explicit LeastSquares(const Eigen::MatrixXd& X);

  Eigen::Index columns() const noexcept { return means_.size(); }

  struct Solution {
    Eigen::VectorXd coef;
    double intercept = 0.0;
    Eigen::VectorXd residuals;
  };

  Solution solve(const Eigen::VectorXd& y) const;

 private:
  Eigen::MatrixXd centered_;
  Eigen::RowVectorXd means_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
};

/// Column indices that are linearly dependent on earlier ones after
/// centering (empty when [1, X] has full column rank).
std::vector<Eigen::Index> dependent_columns(const Eigen::MatrixXd& X);

/// OLS residuals of y on [1, covariates]. Throws Error(RankDeficient).
Eigen::VectorXd residualize(const Eigen::VectorXd& y, const Eigen::MatrixXd& covariates);

/// True when every entry of the column equals the first.
bool is_constant(const Eigen::Ref<const Eigen::VectorXd>& column);

/// Sample standard deviation with n - 1 denominator.
double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace wlingam
