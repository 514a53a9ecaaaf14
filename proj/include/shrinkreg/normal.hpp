#pragma once

namespace shrinkreg {

/// Standard normal CDF.
double normal_cdf(double x);

/// Upper tail 1 - Φ(x), accurate in the far tail.
double normal_sf(double x);

/// Inverse of the standard normal CDF on (0, 1). Rational approximation
/// followed by one Halley refinement step; absolute error below 1e-12 over
/// the range used for confidence intervals.
double normal_quantile(double p);

}  // namespace shrinkreg
