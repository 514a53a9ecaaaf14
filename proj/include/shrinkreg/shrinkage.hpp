#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "shrinkreg/method.hpp"
#include "shrinkreg/panel.hpp"

namespace shrinkreg {

/// Sufficient statistics of one unit's measurements.
struct UnitSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double sum_sq_dev = 0.0;    // Σ_j (X_ij - X̄_i)²
  double half_first = 0.0;    // mean of the first ⌈J/2⌉ measurements
  double half_second = 0.0;   // mean of the rest; equals half_first when J = 1

  double sigma2() const { return sum_sq_dev / static_cast<double>(count - 1); }
};

UnitSummary summarize_unit(std::span<const double> measurements);

/// Per-unit summaries plus the unweighted grand mean. All estimators below
/// work from this; the PanelData overloads summarize first.
struct PanelSummary {
  std::vector<UnitSummary> units;
  double grand_mean = 0.0;

  std::size_t size() const noexcept { return units.size(); }
  std::size_t min_count() const noexcept;
};

PanelSummary summarize(const PanelData& panel);
PanelSummary summarize(std::vector<UnitSummary> units);

struct VarianceComponents {
  std::vector<double> sigma2_i;   // σ̂_i², divisor J_i - 1
  double sigma2_pooled = 0.0;     // σ̂², divisor Σ(J_i - 1)
  double sigma2_theta = 0.0;      // split-half covariance, may be <= 0
  double v_hat = 0.0;             // may be <= 0
  double kappa_hat = 0.0;
  double sample_var_means = 0.0;  // (1/n)Σ(X̄_k - X̄)²
};

struct ShrinkageResult {
  Method method = Method::FE;
  std::vector<double> weights;
  std::vector<double> estimates;
  double target = 0.0;
};

/// Unbiased within-unit variance. Throws EstimatorUndefined if fewer than
/// two measurements.
double sigma2_within(std::span<const double> measurements);

/// (mean of first ⌈J/2⌉, mean of remainder), stored order.
std::pair<double, double> split_half_means(std::span<const double> measurements);

/// (1/n)Σ(X̄_k - X̄)²  -  ((n-1)/n²) Σ σ̂_k²/J_k, unclamped.
double v_hat(const PanelSummary& s);
double v_hat(const PanelData& panel);

/// Pooled within variance and split-half covariance (divisor n-1).
std::pair<double, double> ho_components(const PanelSummary& s);
std::pair<double, double> ho_components(const PanelData& panel);

/// √n · mean(1/J_i). Defined for any panel, including J_i = 1.
double kappa_hat(const PanelSummary& s);
double kappa_hat(const PanelData& panel);

/// All variance components at once; requires J_i >= 2 everywhere.
VarianceComponents variance_components(const PanelSummary& s);
VarianceComponents variance_components(const PanelData& panel);

ShrinkageResult estimate_fe(const PanelSummary& s);
ShrinkageResult estimate_ho(const PanelSummary& s);
ShrinkageResult estimate_he(const PanelSummary& s);

enum class CommonWeight { BiasCorrection, Instrument };
ShrinkageResult estimate_cw(const PanelSummary& s, CommonWeight flavor);

/// Dispatch for the five feasible methods.
ShrinkageResult estimate(const PanelSummary& s, Method m);

ShrinkageResult estimate_fe(const PanelData& panel);
ShrinkageResult estimate_ho(const PanelData& panel);
ShrinkageResult estimate_he(const PanelData& panel);
ShrinkageResult estimate_cw(const PanelData& panel, CommonWeight flavor);
ShrinkageResult estimate(const PanelData& panel, Method m);

}  // namespace shrinkreg
