#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "shrinkreg/panel.hpp"
#include "shrinkreg/shrinkage.hpp"

namespace shrinkreg {

// Laws for the number of measurements J_i.
struct FixedCount {
  std::size_t j = 20;
};
struct PoissonCount {
  double mean = 20.0;
  std::size_t floor = 2;  // draws below the floor are raised to it
};
/// J_i drawn jointly with σ_i², see CorrelatedPairVariance.
struct CorrelatedPairCount {};

using CountLaw = std::variant<FixedCount, PoissonCount, CorrelatedPairCount>;

struct NormalEffect {
  double mean = 0.0;
  double sd = 1.0;
};

// Laws for the noise variance σ_i².
struct ChiSquared1 {};
/// lo or hi with probability 1/2 each.
struct TwoPointUniform {
  double lo = 1.0;
  double hi = 10.0;
};
/// With probability 1/2 each: (σ² = 12γV, J = ⌊2√n⌋) or
/// (σ² = 8γV, J = ⌊(2/3)√n⌋), V = Var(θ). Positively links J_i and σ_i².
struct CorrelatedPairVariance {
  double gamma = 1.0;
};

using VarianceLaw = std::variant<ChiSquared1, TwoPointUniform, CorrelatedPairVariance>;

/// ε = σ·z with z ~ N(0,1), or z = (χ²(2) - 2)/2 (centered, unit variance,
/// right skewed).
enum class NoiseFamily { Normal, GammaCentered };

enum class Dependence { Independent, JSigmaCorrelated };

struct DgpSpec {
  std::size_t n = 1000;
  CountLaw count_law = FixedCount{};
  NormalEffect effect_law;
  VarianceLaw variance_law = ChiSquared1{};
  NoiseFamily noise = NoiseFamily::Normal;
  double alpha = 0.0;
  double beta = 1.0;
  double u_sd = 1.0;
  Dependence dependence = Dependence::Independent;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;

  double var_theta() const noexcept { return effect_law.sd * effect_law.sd; }

  bool operator==(const DgpSpec&) const = default;
};

/// Latent quantities behind a simulated panel.
struct Truth {
  std::vector<double> theta;
  std::vector<double> sigma2;
  std::vector<std::size_t> counts;
};

struct SimulatedPanel {
  PanelData panel;
  Truth truth;
};

/// Materialized panel with unit ids "u1".."un".
SimulatedPanel draw_panel(const DgpSpec& spec, std::uint64_t seed);

/// Same random stream as draw_panel, reduced on the fly to unit summaries.
/// This is what the Monte Carlo engine consumes.
struct SimulatedSummary {
  PanelSummary summary;
  std::vector<double> outcomes;
  Truth truth;
};

SimulatedSummary draw_summary(const DgpSpec& spec, std::uint64_t seed);

}  // namespace shrinkreg
