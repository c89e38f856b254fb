#include "wlingam/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wlingam/error.hpp"
#include "wlingam/ols.hpp"

namespace wlingam {

namespace {

constexpr double kK1 = 79.047;
constexpr double kK2 = 7.4129;
constexpr double kGamma = 0.37457;

double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

double nongaussianity_entropy(const Eigen::Ref<const Eigen::VectorXd>& u) {
  const auto n = u.size();
  if (n < 2 || is_constant(u)) throw Error(ErrorCode::ZeroVariance, "entropy of a constant vector");
  double s1 = 0.0;
  double s2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = u(i);
    s1 += log_cosh(v);
    s2 += v * std::exp(-0.5 * v * v);
  }
  const double m1 = s1 / static_cast<double>(n) - kGamma;
  const double m2 = s2 / static_cast<double>(n);
  return 0.5 * (1.0 + std::log(2.0 * std::numbers::pi)) - kK1 * m1 * m1 - kK2 * m2 * m2;
}

Eigen::VectorXd standardize(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double sd = sample_sd(x);
  if (!(sd > 0.0)) throw Error(ErrorCode::ZeroVariance, "cannot standardize a constant vector");
  return (x.array() - x.mean()) / sd;
}

std::size_t select_exogenous(const Eigen::MatrixXd& data, std::span<const std::size_t> remaining,
                             const IntMatrix& mask) {
  if (remaining.empty()) throw Error(ErrorCode::InvalidArgument, "no candidates");
  const auto k = static_cast<Eigen::Index>(data.cols());
  if (mask.rows() != k || mask.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch, "mask does not match candidate columns");
  }

  std::vector<std::size_t> admissible;
  for (std::size_t i : remaining) {
    bool ok = true;
    for (std::size_t j : remaining) {
      if (j != i && mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == mark::kRequired) {
        ok = false;
        break;
      }
    }
    if (ok) admissible.push_back(i);
  }
  if (admissible.empty()) {
    throw Error(ErrorCode::MaskInfeasible, "no candidate is admissible as a root under the mask");
  }
  if (admissible.size() == 1) return admissible.front();

  const std::size_t m = remaining.size();
  const double dof = static_cast<double>(data.rows() - 1);
  std::vector<Eigen::VectorXd> xs(m);
  std::vector<double> h(m, 0.0);
  std::vector<bool> degenerate(m, false);
  for (std::size_t a = 0; a < m; ++a) {
    const auto col = data.col(static_cast<Eigen::Index>(remaining[a]));
    if (is_constant(col)) {
      degenerate[a] = true;
      continue;
    }
    xs[a] = standardize(col);
    h[a] = nongaussianity_entropy(xs[a]);
  }

  std::vector<double> score(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    if (degenerate[a]) continue;
    for (std::size_t b = a + 1; b < m; ++b) {
      if (degenerate[b]) continue;
      const double rho = xs[a].dot(xs[b]) / dof;
      const double rvar = 1.0 - rho * rho;
      if (!(rvar > 1e-12)) continue;
      const double rsd = std::sqrt(rvar);
      const Eigen::VectorXd r_ab = (xs[a] - rho * xs[b]) / rsd;
      const Eigen::VectorXd r_ba = (xs[b] - rho * xs[a]) / rsd;
      const double M = (h[b] + nongaussianity_entropy(r_ab)) - (h[a] + nongaussianity_entropy(r_ba));
      score[a] += std::pow(std::min(0.0, M), 2);
      score[b] += std::pow(std::min(0.0, -M), 2);
    }
  }

  std::size_t best = admissible.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i : admissible) {
    const auto a = static_cast<std::size_t>(std::find(remaining.begin(), remaining.end(), i) - remaining.begin());
    if (score[a] < best_score || (score[a] == best_score && i < best)) {
      best = i;
      best_score = score[a];
    }
  }
  return best;
}

WithinTimeFit fit_within_time(const Eigen::MatrixXd& residuals, const IntMatrix& mask) {
  const auto k = residuals.cols();
  if (mask.rows() != k || mask.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch, "mask does not match outcome columns");
  }
  if (residuals.rows() <= k + 10) {
    throw Error(ErrorCode::InvalidArgument,
                "need more than " + std::to_string(k + 10) + " subjects for within-time discovery");
  }

  WithinTimeFit fit;
  Eigen::MatrixXd work = residuals;
  std::vector<std::size_t> remaining(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

  while (!remaining.empty()) {
    const std::size_t root = select_exogenous(work, remaining, mask);
    fit.order.push_back(root);
    remaining.erase(std::find(remaining.begin(), remaining.end(), root));
    if (remaining.empty()) break;
    const auto r = static_cast<Eigen::Index>(root);
    const Eigen::VectorXd xr = work.col(r).array() - work.col(r).mean();
    const double var = xr.squaredNorm();
    if (!(var > 0.0)) continue;
    for (std::size_t j : remaining) {
      const auto c = static_cast<Eigen::Index>(j);
      const double beta = (work.col(c).array() - work.col(c).mean()).matrix().dot(xr) / var;
      work.col(c) -= beta * work.col(r);
    }
  }

  fit.B = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t pos = 1; pos < fit.order.size(); ++pos) {
    const auto child = static_cast<Eigen::Index>(fit.order[pos]);
    std::vector<Eigen::Index> parents;
    for (std::size_t q = 0; q < pos; ++q) {
      const auto p = static_cast<Eigen::Index>(fit.order[q]);
      if (mask(child, p) != mark::kForbidden) parents.push_back(p);
    }
    if (parents.empty()) continue;
    Eigen::MatrixXd X(residuals.rows(), static_cast<Eigen::Index>(parents.size()));
    for (std::size_t q = 0; q < parents.size(); ++q) X.col(static_cast<Eigen::Index>(q)) = residuals.col(parents[q]);
    const auto sol = LeastSquares(X).solve(residuals.col(child));
    for (std::size_t q = 0; q < parents.size(); ++q) fit.B(child, parents[q]) = sol.coef(static_cast<Eigen::Index>(q));
  }
  return fit;
}

bool is_permutation_lower_triangular(const Eigen::MatrixXd& B, std::span<const std::size_t> order) {
  const auto k = static_cast<std::size_t>(B.rows());
  if (order.size() != k) return false;
  std::vector<std::size_t> pos(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    if (order[i] >= k || pos[order[i]] != k) return false;
    pos[order[i]] = i;
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t p = 0; p < k; ++p) {
      if (B(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p)) != 0.0 && pos[p] >= pos[c]) return false;
    }
  }
  return true;
}

}  // namespace wlingam
