#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace shrinkreg {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of replication `rep` under `master`. Depends only on the pair, so
/// any replication can be regenerated on its own.
constexpr std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep) noexcept {
  return mix64(master ^ mix64(rep));
}

/// Random stream used by the data-generating processes. The engine is
/// std::mt19937_64; the variate transforms are implemented here so streams
/// do not depend on the standard library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1].
  double uniform_pos() noexcept { return 1.0 - uniform(); }

  /// Standard normal, Marsaglia polar method.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Exponential with unit rate.
  double exponential() noexcept { return -std::log(uniform_pos()); }

  /// Poisson by sequential multiplication; fine for the moderate means
  /// used here.
  unsigned poisson(double mean) noexcept {
    const double limit = std::exp(-mean);
    unsigned k = 0;
    double prod = uniform_pos();
    while (prod > limit) {
      ++k;
      prod *= uniform_pos();
    }
    return k;
  }

  bool coin() noexcept { return uniform() < 0.5; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace shrinkreg
