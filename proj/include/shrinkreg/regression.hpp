#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shrinkreg {

/// OLS of y on an intercept, the (estimated) effect, and optional controls.
struct OlsFit {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  std::vector<double> control_coefs;
  std::vector<double> residuals;
};

/// Fits y = α + β·θ̂ + controls·γ + u. `controls` is n × k (k may be 0).
/// Throws SingularDesign when the regressors are collinear or θ̂ is constant.
OlsFit ols_fit(std::span<const double> theta_hat, std::span<const double> y,
               const Eigen::MatrixXd& controls = Eigen::MatrixXd());

/// Heteroskedasticity-robust Ω̂ for β in the bivariate regression:
///
///   Ω̂ = [(1/n) Σ (θ̂_i - mean θ̂)² û_i²] / [(1/n) Σ (θ̂_i - mean θ̂)²]²
///
/// so that SE(β̂) = √(Ω̂/n). No degrees-of-freedom correction.
double ehw_omega(std::span<const double> theta_hat, std::span<const double> residuals);

/// One-way cluster-robust analogue of ehw_omega: scores (θ̂_i - mean θ̂)·û_i
/// are summed within cluster before squaring. No G/(G-1) correction.
/// Requires at least two distinct clusters.
double cluster_omega(std::span<const double> theta_hat, std::span<const double> residuals,
                     std::span<const std::string> clusters);

/// Ω̂ for the coefficient on θ̂ from the full sandwich
/// n · [(X'X)⁻¹ M (X'X)⁻¹]_ββ with X = [1, θ̂, controls]. M is Σ x_i x_i' û_i²
/// or, when `clusters` is nonempty, Σ_g s_g s_g' with s_g = Σ_{i∈g} x_i û_i.
double sandwich_omega(std::span<const double> theta_hat, std::span<const double> residuals,
                      const Eigen::MatrixXd& controls,
                      std::span<const std::string> clusters = {});

enum class VarianceEstimator { EHW, Cluster };

struct RegressionReport {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  std::vector<double> control_coefs;
  double omega = 0.0;
  double se_beta = 0.0;
  VarianceEstimator variance_estimator = VarianceEstimator::EHW;
  double level = 0.05;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_value = 1.0;
  std::vector<double> residuals;
  std::size_t n = 0;

  bool covers(double b) const noexcept { return ci_low <= b && b <= ci_high; }
};

/// CI = β̂ ± z_{1-level/2} √(Ω̂/n) and the two-sided normal p-value.
/// Throws std::invalid_argument unless 0 < level < 1.
RegressionReport make_report(OlsFit fit, double omega, double level,
                             VarianceEstimator estimator = VarianceEstimator::EHW);

/// Fit, robust variance and report in one call. Cluster variance requires
/// `clusters` to have one label per unit.
RegressionReport regress(std::span<const double> theta_hat, std::span<const double> y,
                         double level, VarianceEstimator estimator = VarianceEstimator::EHW,
                         const Eigen::MatrixXd& controls = Eigen::MatrixXd(),
                         std::span<const std::string> clusters = {});

}  // namespace shrinkreg
