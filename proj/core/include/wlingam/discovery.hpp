#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "wlingam/mask.hpp"

namespace wlingam {

/// Maximum-entropy approximation of differential entropy for a standardized
/// sample:
///   H(u) = (1 + log 2pi)/2 - k1 (E[log cosh u] - gamma)^2 - k2 (E[u exp(-u^2/2)])^2
/// Lower values indicate stronger non-Gaussianity. Throws Error(ZeroVariance).
double nongaussianity_entropy(const Eigen::Ref<const Eigen::VectorXd>& u);

/// (x - mean) / sd with the n - 1 denominator. Throws Error(ZeroVariance).
Eigen::VectorXd standardize(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Picks the most exogenous variable among `remaining` (column indices of
/// `data`). `mask` is k x k over all columns, row = child. A candidate is
/// inadmissible when the mask requires it to have a parent among the other
/// remaining candidates. Score of candidate i is
///   sum_{j != i} min(0, M(i, j))^2,
///   M(i, j) = [H(x_j) + H(r_{i|j})] - [H(x_i) + H(r_{j|i})],
/// where r_{a|b} is the standardized residual of x_a regressed on x_b.
/// Ties go to the lowest index. Throws Error(MaskInfeasible).
std::size_t select_exogenous(const Eigen::MatrixXd& data, std::span<const std::size_t> remaining,
                             const IntMatrix& mask);

struct WithinTimeFit {
  std::vector<std::size_t> order;
  Eigen::MatrixXd B;  // (child, parent), zero at forbidden mask entries
};

/// Ordering by repeated exogenous selection and pairwise residualization,
/// then OLS of each column on its admissible predecessors.
WithinTimeFit fit_within_time(const Eigen::MatrixXd& residuals, const IntMatrix& mask);

/// True when every nonzero B(child, parent) has parent before child in
/// `order` (i.e. B is strictly lower triangular after permutation).
bool is_permutation_lower_triangular(const Eigen::MatrixXd& B, std::span<const std::size_t> order);

}  // namespace wlingam
