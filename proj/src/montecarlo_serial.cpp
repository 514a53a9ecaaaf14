#include <stdexcept>

#include "replication.hpp"
#include "shrinkreg/montecarlo.hpp"
#include "shrinkreg/rng.hpp"

namespace shrinkreg::serial {

ReplicationTable run_replications(const DgpSpec& spec, std::span<const Method> methods,
                                  const MonteCarloOptions& opts) {
  detail::check_options(spec, methods, opts);
  ReplicationTable table = detail::empty_table(methods, opts.reps);
  const std::size_t m = methods.size();
  for (std::size_t r = 0; r < opts.reps; ++r) {
    run_replication(spec, methods, opts.level, replication_seed(opts.master_seed, r),
                    std::span<MethodOutcome>(table.cells).subspan(r * m, m));
  }
  return table;
}

CoverageCurve coverage_curve(const ReplicationTable& table, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("coverage grid is empty");
  CoverageCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.methods = table.methods;
  for (double b : grid) {
    for (std::size_t k = 0; k < table.methods.size(); ++k) {
      curve.coverage.push_back(detail::covered_fraction(table, k, b));
    }
  }
  return curve;
}

}  // namespace shrinkreg::serial
