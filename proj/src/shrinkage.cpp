#include "shrinkreg/shrinkage.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "shrinkreg/errors.hpp"

namespace shrinkreg {

namespace {

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void require_two(const PanelSummary& s, const char* what) {
  if (s.min_count() < 2) {
    throw EstimatorUndefined(std::string(what) + ": every unit needs J_i >= 2",
                             "J_i", static_cast<double>(s.min_count()));
  }
}

// Sample covariance with divisor n - 1.
double split_half_covariance(const PanelSummary& s) {
  const double n = static_cast<double>(s.size());
  double m1 = 0.0, m2 = 0.0;
  for (const auto& u : s.units) {
    m1 += u.half_first;
    m2 += u.half_second;
  }
  m1 /= n;
  m2 /= n;
  double cov = 0.0;
  for (const auto& u : s.units) cov += (u.half_first - m1) * (u.half_second - m2);
  return cov / (n - 1.0);
}

double sample_variance_of_means(const PanelSummary& s) {
  double acc = 0.0;
  for (const auto& u : s.units) acc += (u.mean - s.grand_mean) * (u.mean - s.grand_mean);
  return acc / static_cast<double>(s.size());
}

ShrinkageResult combine(const PanelSummary& s, Method m, std::vector<double> weights) {
  ShrinkageResult r;
  r.method = m;
  r.target = s.grand_mean;
  r.estimates.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    r.estimates[i] = weights[i] * s.units[i].mean + (1.0 - weights[i]) * r.target;
  }
  r.weights = std::move(weights);
  return r;
}

}  // namespace

UnitSummary summarize_unit(std::span<const double> xs) {
  UnitSummary u;
  u.count = xs.size();
  u.mean = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - u.mean) * (x - u.mean);
  u.sum_sq_dev = ss;
  if (xs.size() >= 2) {
    const std::size_t head = (xs.size() + 1) / 2;
    u.half_first = mean(xs.first(head));
    u.half_second = mean(xs.subspan(head));
  } else {
    u.half_first = u.half_second = u.mean;
  }
  return u;
}

std::size_t PanelSummary::min_count() const noexcept {
  std::size_t m = std::numeric_limits<std::size_t>::max();
  for (const auto& u : units) m = std::min(m, u.count);
  return m;
}

PanelSummary summarize(std::vector<UnitSummary> units) {
  PanelSummary s;
  s.units = std::move(units);
  double acc = 0.0;
  for (const auto& u : s.units) acc += u.mean;
  s.grand_mean = acc / static_cast<double>(s.units.size());
  return s;
}

PanelSummary summarize(const PanelData& panel) {
  std::vector<UnitSummary> units;
  units.reserve(panel.size());
  for (const Unit& u : panel.units()) units.push_back(summarize_unit(u.measurements));
  return summarize(std::move(units));
}

double sigma2_within(std::span<const double> xs) {
  if (xs.size() < 2) {
    throw EstimatorUndefined("insufficient measurements for within-variance", "J_i",
                             static_cast<double>(xs.size()));
  }
  return summarize_unit(xs).sigma2();
}

std::pair<double, double> split_half_means(std::span<const double> xs) {
  if (xs.size() < 2) {
    throw EstimatorUndefined("cannot split fewer than 2 measurements", "J_i",
                             static_cast<double>(xs.size()));
  }
  const UnitSummary u = summarize_unit(xs);
  return {u.half_first, u.half_second};
}

double v_hat(const PanelSummary& s) {
  require_two(s, "within-variance");
  const double n = static_cast<double>(s.size());
  double noise = 0.0;
  for (const auto& u : s.units) noise += u.sigma2() / static_cast<double>(u.count);
  return sample_variance_of_means(s) - (n - 1.0) / (n * n) * noise;
}

std::pair<double, double> ho_components(const PanelSummary& s) {
  require_two(s, "split-half");
  double ss = 0.0;
  double dof = 0.0;
  for (const auto& u : s.units) {
    ss += u.sum_sq_dev;
    dof += static_cast<double>(u.count - 1);
  }
  return {ss / dof, split_half_covariance(s)};
}

double kappa_hat(const PanelSummary& s) {
  const double n = static_cast<double>(s.size());
  double inv = 0.0;
  for (const auto& u : s.units) inv += 1.0 / static_cast<double>(u.count);
  return std::sqrt(n) * inv / n;
}

VarianceComponents variance_components(const PanelSummary& s) {
  require_two(s, "variance components");
  VarianceComponents vc;
  vc.sigma2_i.reserve(s.size());
  for (const auto& u : s.units) vc.sigma2_i.push_back(u.sigma2());
  std::tie(vc.sigma2_pooled, vc.sigma2_theta) = ho_components(s);
  vc.v_hat = v_hat(s);
  vc.kappa_hat = kappa_hat(s);
  vc.sample_var_means = sample_variance_of_means(s);
  return vc;
}

ShrinkageResult estimate_fe(const PanelSummary& s) {
  return combine(s, Method::FE, std::vector<double>(s.size(), 1.0));
}

ShrinkageResult estimate_ho(const PanelSummary& s) {
  const auto [sigma2, sigma2_theta] = ho_components(s);
  if (!(sigma2_theta > 0.0)) {
    throw EstimatorUndefined("non-positive signal variance: HO undefined (sigma2_theta = " +
                                 format_value(sigma2_theta) + " <= 0)",
                             "sigma2_theta", sigma2_theta);
  }
  std::vector<double> w(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    w[i] = sigma2_theta / (sigma2 / static_cast<double>(s.units[i].count) + sigma2_theta);
  }
  return combine(s, Method::HO, std::move(w));
}

ShrinkageResult estimate_he(const PanelSummary& s) {
  const double v = v_hat(s);
  if (!(v > 0.0)) {
    throw EstimatorUndefined("non-positive V_hat: HE undefined (V_hat = " + format_value(v) +
                                 " <= 0)",
                             "V_hat", v);
  }
  std::vector<double> w(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& u = s.units[i];
    w[i] = v / (u.sigma2() / static_cast<double>(u.count) + v);
  }
  return combine(s, Method::HE, std::move(w));
}

ShrinkageResult estimate_cw(const PanelSummary& s, CommonWeight flavor) {
  require_two(s, "common-weight shrinkage");
  double w = 0.0;
  if (flavor == CommonWeight::BiasCorrection) {
    const double var_means = sample_variance_of_means(s);
    const double v = v_hat(s);
    if (!(var_means > 0.0) || !(v > 0.0)) {
      throw EstimatorUndefined("CW weight undefined (V_hat = " + format_value(v) +
                                   ", Var(unit means) = " + format_value(var_means) + ")",
                               "V_hat", v);
    }
    w = v / var_means;
  } else {
    // Split-half covariance estimates Var(θ); scaling by the variance of the
    // full unit means (divisor n-1, like the covariance) makes the weight
    // apply to X̄_i rather than to the half mean.
    const double n = static_cast<double>(s.size());
    const double var_means = sample_variance_of_means(s) * n / (n - 1.0);
    const double cov = split_half_covariance(s);
    w = var_means > 0.0 ? cov / var_means : std::numeric_limits<double>::quiet_NaN();
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw EstimatorUndefined("CW weight undefined (split-half covariance = " + format_value(cov) +
                                   ", Var(unit means) = " + format_value(var_means) + ")",
                               "cw_iv_weight", w);
    }
  }
  const Method m = flavor == CommonWeight::BiasCorrection ? Method::CW_BC : Method::CW_IV;
  return combine(s, m, std::vector<double>(s.size(), w));
}

ShrinkageResult estimate(const PanelSummary& s, Method m) {
  switch (m) {
    case Method::FE: return estimate_fe(s);
    case Method::HO: return estimate_ho(s);
    case Method::HE: return estimate_he(s);
    case Method::CW_BC: return estimate_cw(s, CommonWeight::BiasCorrection);
    case Method::CW_IV: return estimate_cw(s, CommonWeight::Instrument);
    case Method::Oracle:
    case Method::SemiOracle: break;
  }
  throw std::invalid_argument(std::string(to_string(m)) + " needs the true effects; simulation only");
}

double v_hat(const PanelData& p) { return v_hat(summarize(p)); }
std::pair<double, double> ho_components(const PanelData& p) { return ho_components(summarize(p)); }
double kappa_hat(const PanelData& p) { return kappa_hat(summarize(p)); }
VarianceComponents variance_components(const PanelData& p) { return variance_components(summarize(p)); }
ShrinkageResult estimate_fe(const PanelData& p) { return estimate_fe(summarize(p)); }
ShrinkageResult estimate_ho(const PanelData& p) { return estimate_ho(summarize(p)); }
ShrinkageResult estimate_he(const PanelData& p) { return estimate_he(summarize(p)); }
ShrinkageResult estimate_cw(const PanelData& p, CommonWeight f) { return estimate_cw(summarize(p), f); }
ShrinkageResult estimate(const PanelData& p, Method m) { return estimate(summarize(p), m); }

}  // namespace shrinkreg
