#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shrinkreg/dgp.hpp"
#include "shrinkreg/method.hpp"

namespace shrinkreg {

/// What one replication records for one method.
struct MethodOutcome {
  bool ok = false;
  double beta_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mse_theta = 0.0;  // (1/n) Σ (θ̂_i - θ_i)²

  bool operator==(const MethodOutcome&) const = default;
};

/// Replication-major table: cell (r, k) is replication r, methods[k].
struct ReplicationTable {
  std::vector<Method> methods;
  std::size_t reps = 0;
  std::vector<MethodOutcome> cells;

  const MethodOutcome& at(std::size_t rep, std::size_t k) const {
    return cells[rep * methods.size() + k];
  }
  std::optional<std::size_t> index_of(Method m) const;

  bool operator==(const ReplicationTable&) const = default;
};

struct MonteCarloOptions {
  std::size_t reps = 3000;
  double level = 0.05;
  std::uint64_t master_seed = 0;
  int workers = 0;  // 0: OpenMP default
};

/// Draws one panel with replication_seed(master, rep), applies every method
/// and fits OLS with EHW inference. An undefined estimator marks the cell
/// !ok instead of throwing.
void run_replication(const DgpSpec& spec, std::span<const Method> methods, double level,
                     std::uint64_t seed, std::span<MethodOutcome> out);

/// Replications distributed over an OpenMP team. The result does not depend
/// on the number of workers.
ReplicationTable run_replications(const DgpSpec& spec, std::span<const Method> methods,
                                  const MonteCarloOptions& opts);

/// Coverage fraction for each (grid value, method): the share of
/// successful replications whose CI contains the grid value.
struct CoverageCurve {
  std::vector<double> grid;
  std::vector<Method> methods;
  std::vector<double> coverage;  // grid-major: coverage[g * methods.size() + k]

  double at(std::size_t g, std::size_t k) const { return coverage[g * methods.size() + k]; }
};

CoverageCurve coverage_curve(const ReplicationTable& table, std::span<const double> grid,
                             int workers = 0);

namespace serial {

/// Single-threaded reference versions of the parallel kernels above.
ReplicationTable run_replications(const DgpSpec& spec, std::span<const Method> methods,
                                  const MonteCarloOptions& opts);
CoverageCurve coverage_curve(const ReplicationTable& table, std::span<const double> grid);

}  // namespace serial

struct MethodSummary {
  Method method = Method::FE;
  std::size_t ok_reps = 0;
  std::size_t failed_reps = 0;
  double sqrt_n_mse_beta = 0.0;  // √(n · mean (β̂ - β)²)
  double coverage_pct = 0.0;
  double abs_bias = 0.0;         // |mean β̂ - β|
  double mean_abs_error = 0.0;   // mean |β̂ - β|
  double mse_theta = 0.0;
  double mean_beta = 0.0;
  double sd_beta = 0.0;
  double mean_se = 0.0;
};

struct SimReport {
  DgpSpec spec;
  std::size_t reps = 0;
  double level = 0.05;
  std::uint64_t master_seed = 0;
  std::vector<MethodSummary> rows;
  std::optional<CoverageCurve> curve;

  const MethodSummary* row(Method m) const;
};

/// Aggregates in replication order, so the result is bit-for-bit stable.
SimReport summarize_replications(const DgpSpec& spec, const ReplicationTable& table,
                                 const MonteCarloOptions& opts);

SimReport run_monte_carlo(const DgpSpec& spec, std::span<const Method> methods,
                          const MonteCarloOptions& opts);

/// run_monte_carlo plus coverage curves over `grid`; CIs are computed once
/// per replication and reused for every grid value.
SimReport run_coverage(const DgpSpec& spec, std::span<const Method> methods,
                       std::span<const double> grid, const MonteCarloOptions& opts);

/// `count` evenly spaced values lo, lo+step, ..., inclusive of hi when it
/// falls on the lattice (within 1e-9 step).
std::vector<double> make_grid(double lo, double hi, double step);

}  // namespace shrinkreg
