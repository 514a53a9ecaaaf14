#include "shrinkreg/dgp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "shrinkreg/rng.hpp"

namespace shrinkreg {

void DgpSpec::validate() const {
  if (n < 3) throw std::invalid_argument("dgp: n must be at least 3");
  if (!(effect_law.sd > 0.0) || !std::isfinite(effect_law.mean)) {
    throw std::invalid_argument("dgp: effect sd must be positive");
  }
  if (!(u_sd >= 0.0)) throw std::invalid_argument("dgp: u sd must be nonnegative");
  if (!std::isfinite(alpha) || !std::isfinite(beta)) throw std::invalid_argument("dgp: non-finite alpha/beta");

  const bool pair_count = std::holds_alternative<CorrelatedPairCount>(count_law);
  const bool pair_var = std::holds_alternative<CorrelatedPairVariance>(variance_law);
  if (dependence == Dependence::JSigmaCorrelated) {
    if (!pair_count || !pair_var) {
      throw std::invalid_argument("dgp: correlated dependence needs correlated_pair count and variance laws");
    }
    if (!(std::get<CorrelatedPairVariance>(variance_law).gamma > 0.0)) {
      throw std::invalid_argument("dgp: correlated pair needs gamma > 0");
    }
    if (static_cast<std::size_t>(std::floor(2.0 / 3.0 * std::sqrt(static_cast<double>(n)))) < 2) {
      throw std::invalid_argument("dgp: n too small for the correlated pair design");
    }
  } else if (pair_count || pair_var) {
    throw std::invalid_argument("dgp: correlated_pair laws require dependence = j_sigma_correlated");
  }
  if (const auto* f = std::get_if<FixedCount>(&count_law); f && f->j < 1) {
    throw std::invalid_argument("dgp: fixed J must be at least 1");
  }
  if (const auto* p = std::get_if<PoissonCount>(&count_law)) {
    if (!(p->mean > 0.0) || p->mean > 500.0) throw std::invalid_argument("dgp: Poisson mean must be in (0, 500]");
    if (p->floor < 1) throw std::invalid_argument("dgp: Poisson floor must be at least 1");
  }
  if (const auto* t = std::get_if<TwoPointUniform>(&variance_law)) {
    if (!(t->lo >= 0.0) || !(t->hi >= 0.0)) throw std::invalid_argument("dgp: variances must be nonnegative");
  }
}

namespace {

// Walks the random stream unit by unit. Draw order per unit: (J, σ²),
// θ, the J measurement noises, u. Both draw_panel and draw_summary go
// through here so they see identical numbers.
template <typename Sink>
void generate(const DgpSpec& spec, std::uint64_t seed, Sink&& sink) {
  spec.validate();
  Rng rng(seed);
  const double root_n = std::sqrt(static_cast<double>(spec.n));
  const double v = spec.var_theta();
  std::vector<double> xs;

  for (std::size_t i = 0; i < spec.n; ++i) {
    std::size_t count = 0;
    double sigma2 = 0.0;
    if (spec.dependence == Dependence::JSigmaCorrelated) {
      const double gamma = std::get<CorrelatedPairVariance>(spec.variance_law).gamma;
      if (rng.coin()) {
        sigma2 = 12.0 * gamma * v;
        count = static_cast<std::size_t>(std::floor(2.0 * root_n));
      } else {
        sigma2 = 8.0 * gamma * v;
        count = static_cast<std::size_t>(std::floor(2.0 / 3.0 * root_n));
      }
    } else {
      if (const auto* f = std::get_if<FixedCount>(&spec.count_law)) {
        count = f->j;
      } else {
        const auto& p = std::get<PoissonCount>(spec.count_law);
        count = std::max<std::size_t>(rng.poisson(p.mean), p.floor);
      }
      if (std::holds_alternative<ChiSquared1>(spec.variance_law)) {
        const double z = rng.normal();
        sigma2 = z * z;
      } else {
        const auto& t = std::get<TwoPointUniform>(spec.variance_law);
        sigma2 = rng.coin() ? t.lo : t.hi;
      }
    }

    const double theta = spec.effect_law.mean + spec.effect_law.sd * rng.normal();
    const double sigma = std::sqrt(sigma2);
    xs.resize(count);
    for (double& x : xs) {
      const double z = spec.noise == NoiseFamily::Normal ? rng.normal() : rng.exponential() - 1.0;
      x = theta + sigma * z;
    }
    const double y = spec.alpha + spec.beta * theta + spec.u_sd * rng.normal();
    sink(i, theta, sigma2, std::span<const double>(xs), y);
  }
}

}  // namespace

SimulatedPanel draw_panel(const DgpSpec& spec, std::uint64_t seed) {
  std::vector<Unit> units;
  Truth truth;
  units.reserve(spec.n);
  generate(spec, seed, [&](std::size_t i, double theta, double sigma2, std::span<const double> xs, double y) {
    Unit u;
    u.id = "u" + std::to_string(i + 1);
    u.measurements.assign(xs.begin(), xs.end());
    u.outcome = y;
    units.push_back(std::move(u));
    truth.theta.push_back(theta);
    truth.sigma2.push_back(sigma2);
    truth.counts.push_back(xs.size());
  });
  return {PanelData(std::move(units)), std::move(truth)};
}

SimulatedSummary draw_summary(const DgpSpec& spec, std::uint64_t seed) {
  SimulatedSummary out;
  std::vector<UnitSummary> units;
  units.reserve(spec.n);
  out.outcomes.reserve(spec.n);
  generate(spec, seed, [&](std::size_t, double theta, double sigma2, std::span<const double> xs, double y) {
    units.push_back(summarize_unit(xs));
    out.outcomes.push_back(y);
    out.truth.theta.push_back(theta);
    out.truth.sigma2.push_back(sigma2);
    out.truth.counts.push_back(xs.size());
  });
  out.summary = summarize(std::move(units));
  return out;
}

}  // namespace shrinkreg
