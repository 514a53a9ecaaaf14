#pragma once

// Internal helpers shared by the parallel and serial Monte Carlo drivers.

#include <cstddef>
#include <limits>
#include <span>

#include "shrinkreg/montecarlo.hpp"

namespace shrinkreg::detail {

inline ReplicationTable empty_table(std::span<const Method> methods, std::size_t reps) {
  ReplicationTable t;
  t.methods.assign(methods.begin(), methods.end());
  t.reps = reps;
  t.cells.resize(reps * methods.size());
  return t;
}

void check_options(const DgpSpec& spec, std::span<const Method> methods,
                   const MonteCarloOptions& opts);

/// Coverage count for one (grid value, method) pair.
inline double covered_fraction(const ReplicationTable& table, std::size_t k, double b) {
  std::size_t ok = 0;
  std::size_t hit = 0;
  for (std::size_t r = 0; r < table.reps; ++r) {
    const MethodOutcome& c = table.at(r, k);
    if (!c.ok) continue;
    ++ok;
    if (c.ci_low <= b && b <= c.ci_high) ++hit;
  }
  return ok == 0 ? std::numeric_limits<double>::quiet_NaN()
                 : static_cast<double>(hit) / static_cast<double>(ok);
}

}  // namespace shrinkreg::detail
