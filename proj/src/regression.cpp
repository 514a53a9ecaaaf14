#include "shrinkreg/regression.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "shrinkreg/errors.hpp"
#include "shrinkreg/normal.hpp"

namespace shrinkreg {

namespace {

struct Centered {
  double mean = 0.0;
  double sxx = 0.0;
};

Centered center(std::span<const double> x) {
  Centered c;
  for (double v : x) c.mean += v;
  c.mean /= static_cast<double>(x.size());
  for (double v : x) c.sxx += (v - c.mean) * (v - c.mean);
  return c;
}

bool negligible_spread(std::span<const double> x, double sxx) {
  double sumsq = 0.0;
  for (double v : x) sumsq += v * v;
  return !(sxx > 1e-24 * sumsq);
}

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

Eigen::MatrixXd design_matrix(std::span<const double> theta_hat, const Eigen::MatrixXd& controls) {
  const auto n = static_cast<Eigen::Index>(theta_hat.size());
  Eigen::MatrixXd x(n, 2 + controls.cols());
  x.col(0).setOnes();
  x.col(1) = Eigen::Map<const Eigen::VectorXd>(theta_hat.data(), n);
  if (controls.cols() > 0) x.rightCols(controls.cols()) = controls;
  return x;
}

}  // namespace

OlsFit ols_fit(std::span<const double> theta_hat, std::span<const double> y,
               const Eigen::MatrixXd& controls) {
  check_lengths(theta_hat.size(), y.size(), "ols_fit");
  const std::size_t n = y.size();
  const std::size_t k = 2 + static_cast<std::size_t>(controls.cols());
  if (controls.cols() > 0 && static_cast<std::size_t>(controls.rows()) != n) {
    throw std::invalid_argument("ols_fit: controls row count mismatch");
  }
  if (n < k + 1) throw SingularDesign("singular design: need at least " + std::to_string(k + 1) + " observations");

  OlsFit fit;
  fit.residuals.resize(n);
  const Centered t = center(theta_hat);
  if (negligible_spread(theta_hat, t.sxx)) throw SingularDesign("singular design: regressor has no variation");

  if (controls.cols() == 0) {
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= static_cast<double>(n);
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) sxy += (theta_hat[i] - t.mean) * (y[i] - ybar);
    fit.beta_hat = sxy / t.sxx;
    fit.alpha_hat = ybar - fit.beta_hat * t.mean;
    for (std::size_t i = 0; i < n; ++i) {
      fit.residuals[i] = y[i] - fit.alpha_hat - fit.beta_hat * theta_hat[i];
    }
    return fit;
  }

  const Eigen::MatrixXd x = design_matrix(theta_hat, controls);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-12);
  if (qr.rank() < x.cols()) throw SingularDesign("singular design: regressors are collinear");
  const Eigen::VectorXd coef = qr.solve(yv);
  fit.alpha_hat = coef(0);
  fit.beta_hat = coef(1);
  fit.control_coefs.assign(coef.data() + 2, coef.data() + coef.size());
  const Eigen::VectorXd resid = yv - x * coef;
  for (std::size_t i = 0; i < n; ++i) fit.residuals[i] = resid(static_cast<Eigen::Index>(i));
  return fit;
}

double ehw_omega(std::span<const double> theta_hat, std::span<const double> residuals) {
  check_lengths(theta_hat.size(), residuals.size(), "ehw_omega");
  const Centered t = center(theta_hat);
  if (negligible_spread(theta_hat, t.sxx)) throw SingularDesign("singular design: regressor has no variation");
  const double n = static_cast<double>(theta_hat.size());
  double meat = 0.0;
  for (std::size_t i = 0; i < theta_hat.size(); ++i) {
    const double score = (theta_hat[i] - t.mean) * residuals[i];
    meat += score * score;
  }
  const double bread = t.sxx / n;
  return (meat / n) / (bread * bread);
}

double cluster_omega(std::span<const double> theta_hat, std::span<const double> residuals,
                     std::span<const std::string> clusters) {
  check_lengths(theta_hat.size(), residuals.size(), "cluster_omega");
  check_lengths(theta_hat.size(), clusters.size(), "cluster_omega");
  const Centered t = center(theta_hat);
  if (negligible_spread(theta_hat, t.sxx)) throw SingularDesign("singular design: regressor has no variation");

  // Cluster sums in order of first appearance.
  std::unordered_map<std::string_view, std::size_t> slot;
  std::vector<double> sums;
  for (std::size_t i = 0; i < theta_hat.size(); ++i) {
    auto [it, fresh] = slot.try_emplace(clusters[i], sums.size());
    if (fresh) sums.push_back(0.0);
    sums[it->second] += (theta_hat[i] - t.mean) * residuals[i];
  }
  if (sums.size() < 2) throw std::invalid_argument("cluster_omega: need at least 2 clusters");

  const double n = static_cast<double>(theta_hat.size());
  double meat = 0.0;
  for (double s : sums) meat += s * s;
  const double bread = t.sxx / n;
  return (meat / n) / (bread * bread);
}

double sandwich_omega(std::span<const double> theta_hat, std::span<const double> residuals,
                      const Eigen::MatrixXd& controls, std::span<const std::string> clusters) {
  check_lengths(theta_hat.size(), residuals.size(), "sandwich_omega");
  const Eigen::MatrixXd x = design_matrix(theta_hat, controls);
  const auto n = x.rows();
  const auto k = x.cols();

  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  if (clusters.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd s = x.row(i).transpose() * residuals[static_cast<std::size_t>(i)];
      meat.noalias() += s * s.transpose();
    }
  } else {
    check_lengths(theta_hat.size(), clusters.size(), "sandwich_omega");
    std::unordered_map<std::string_view, std::size_t> slot;
    std::vector<Eigen::VectorXd> sums;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto [it, fresh] = slot.try_emplace(clusters[static_cast<std::size_t>(i)], sums.size());
      if (fresh) sums.push_back(Eigen::VectorXd::Zero(k));
      sums[it->second] += x.row(i).transpose() * residuals[static_cast<std::size_t>(i)];
    }
    if (sums.size() < 2) throw std::invalid_argument("sandwich_omega: need at least 2 clusters");
    for (const auto& s : sums) meat.noalias() += s * s.transpose();
  }

  const Eigen::MatrixXd xtx = x.transpose() * x;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  if (!lu.isInvertible()) throw SingularDesign("singular design: X'X not invertible");
  const Eigen::MatrixXd bread = lu.inverse();
  const Eigen::MatrixXd v = bread * meat * bread;
  return static_cast<double>(n) * v(1, 1);
}

RegressionReport make_report(OlsFit fit, double omega, double level, VarianceEstimator estimator) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  RegressionReport r;
  r.n = fit.residuals.size();
  r.alpha_hat = fit.alpha_hat;
  r.beta_hat = fit.beta_hat;
  r.control_coefs = std::move(fit.control_coefs);
  r.residuals = std::move(fit.residuals);
  r.omega = omega;
  r.variance_estimator = estimator;
  r.level = level;
  r.se_beta = std::sqrt(omega / static_cast<double>(r.n));

  const double z = normal_quantile(1.0 - level / 2.0);
  r.ci_low = r.beta_hat - z * r.se_beta;
  r.ci_high = r.beta_hat + z * r.se_beta;
  if (r.se_beta > 0.0) {
    r.p_value = 2.0 * normal_sf(std::abs(r.beta_hat / r.se_beta));
  } else {
    r.p_value = r.beta_hat != 0.0 ? 0.0 : 1.0;
  }
  return r;
}

RegressionReport regress(std::span<const double> theta_hat, std::span<const double> y,
                         double level, VarianceEstimator estimator,
                         const Eigen::MatrixXd& controls, std::span<const std::string> clusters) {
  if (estimator == VarianceEstimator::Cluster && clusters.size() != theta_hat.size()) {
    throw std::invalid_argument("cluster variance requires one cluster label per unit");
  }
  OlsFit fit = ols_fit(theta_hat, y, controls);
  double omega = 0.0;
  if (controls.cols() == 0) {
    omega = estimator == VarianceEstimator::EHW ? ehw_omega(theta_hat, fit.residuals)
                                                : cluster_omega(theta_hat, fit.residuals, clusters);
  } else {
    omega = sandwich_omega(theta_hat, fit.residuals, controls,
                           estimator == VarianceEstimator::Cluster ? clusters
                                                                   : std::span<const std::string>{});
  }
  return make_report(std::move(fit), omega, level, estimator);
}

}  // namespace shrinkreg
