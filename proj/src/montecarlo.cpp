#include "shrinkreg/montecarlo.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "replication.hpp"
#include "shrinkreg/errors.hpp"
#include "shrinkreg/regression.hpp"
#include "shrinkreg/rng.hpp"

namespace shrinkreg {

std::optional<std::size_t> ReplicationTable::index_of(Method m) const {
  auto it = std::find(methods.begin(), methods.end(), m);
  if (it == methods.end()) return std::nullopt;
  return static_cast<std::size_t>(it - methods.begin());
}

const MethodSummary* SimReport::row(Method m) const {
  for (const auto& r : rows) {
    if (r.method == m) return &r;
  }
  return nullptr;
}

namespace detail {

void check_options(const DgpSpec& spec, std::span<const Method> methods,
                   const MonteCarloOptions& opts) {
  spec.validate();
  if (methods.empty()) throw std::invalid_argument("no methods requested");
  if (opts.reps < 1) throw std::invalid_argument("reps must be at least 1");
  if (!(opts.level > 0.0 && opts.level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
}

}  // namespace detail

namespace {

// Shrinkage with the true Var(θ) and estimated σ̂_i²; simulation only.
std::vector<double> semi_oracle_estimates(const PanelSummary& s, double var_theta) {
  if (s.min_count() < 2) throw EstimatorUndefined("semi-oracle needs J_i >= 2", "J_i", 0.0);
  std::vector<double> est(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& u = s.units[i];
    const double c = var_theta / (u.sigma2() / static_cast<double>(u.count) + var_theta);
    est[i] = c * u.mean + (1.0 - c) * s.grand_mean;
  }
  return est;
}

}  // namespace

void run_replication(const DgpSpec& spec, std::span<const Method> methods, double level,
                     std::uint64_t seed, std::span<MethodOutcome> out) {
  const SimulatedSummary draw = draw_summary(spec, seed);
  const auto& theta = draw.truth.theta;

  for (std::size_t k = 0; k < methods.size(); ++k) {
    MethodOutcome& cell = out[k];
    cell = MethodOutcome{};
    try {
      std::vector<double> est;
      switch (methods[k]) {
        case Method::Oracle: est = theta; break;
        case Method::SemiOracle: est = semi_oracle_estimates(draw.summary, spec.var_theta()); break;
        default: est = estimate(draw.summary, methods[k]).estimates; break;
      }
      const RegressionReport rep = regress(est, draw.outcomes, level);
      double sq = 0.0;
      for (std::size_t i = 0; i < est.size(); ++i) sq += (est[i] - theta[i]) * (est[i] - theta[i]);
      cell.ok = true;
      cell.beta_hat = rep.beta_hat;
      cell.se = rep.se_beta;
      cell.ci_low = rep.ci_low;
      cell.ci_high = rep.ci_high;
      cell.mse_theta = sq / static_cast<double>(est.size());
    } catch (const EstimatorUndefined&) {
      cell.ok = false;
    }
  }
}

ReplicationTable run_replications(const DgpSpec& spec, std::span<const Method> methods,
                                  const MonteCarloOptions& opts) {
  detail::check_options(spec, methods, opts);
  ReplicationTable table = detail::empty_table(methods, opts.reps);
  const std::size_t m = methods.size();
  const int workers = opts.workers > 0 ? opts.workers : omp_get_max_threads();
  const auto reps = static_cast<std::int64_t>(opts.reps);

#pragma omp parallel for num_threads(workers) schedule(dynamic, 4)
  for (std::int64_t r = 0; r < reps; ++r) {
    const auto rep = static_cast<std::size_t>(r);
    run_replication(spec, methods, opts.level, replication_seed(opts.master_seed, rep),
                    std::span<MethodOutcome>(table.cells).subspan(rep * m, m));
  }
  return table;
}

CoverageCurve coverage_curve(const ReplicationTable& table, std::span<const double> grid,
                             int workers) {
  if (grid.empty()) throw std::invalid_argument("coverage grid is empty");
  CoverageCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.methods = table.methods;
  const std::size_t m = table.methods.size();
  curve.coverage.resize(grid.size() * m);
  const int team = workers > 0 ? workers : omp_get_max_threads();
  const auto points = static_cast<std::int64_t>(grid.size());

#pragma omp parallel for num_threads(team) schedule(static)
  for (std::int64_t g = 0; g < points; ++g) {
    const auto gi = static_cast<std::size_t>(g);
    for (std::size_t k = 0; k < m; ++k) {
      curve.coverage[gi * m + k] = detail::covered_fraction(table, k, grid[gi]);
    }
  }
  return curve;
}

SimReport summarize_replications(const DgpSpec& spec, const ReplicationTable& table,
                                 const MonteCarloOptions& opts) {
  SimReport report;
  report.spec = spec;
  report.reps = table.reps;
  report.level = opts.level;
  report.master_seed = opts.master_seed;
  const double n = static_cast<double>(spec.n);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t k = 0; k < table.methods.size(); ++k) {
    MethodSummary row;
    row.method = table.methods[k];
    double sum_beta = 0.0, sum_sq_err = 0.0, sum_abs_err = 0.0, sum_mse = 0.0, sum_se = 0.0;
    std::size_t covered = 0;
    for (std::size_t r = 0; r < table.reps; ++r) {
      const MethodOutcome& c = table.at(r, k);
      if (!c.ok) {
        ++row.failed_reps;
        continue;
      }
      ++row.ok_reps;
      const double err = c.beta_hat - spec.beta;
      sum_beta += c.beta_hat;
      sum_sq_err += err * err;
      sum_abs_err += std::abs(err);
      sum_mse += c.mse_theta;
      sum_se += c.se;
      if (c.ci_low <= spec.beta && spec.beta <= c.ci_high) ++covered;
    }
    if (row.ok_reps == 0) {
      row.sqrt_n_mse_beta = row.coverage_pct = row.abs_bias = row.mean_abs_error = nan;
      row.mse_theta = row.mean_beta = row.sd_beta = row.mean_se = nan;
      report.rows.push_back(row);
      continue;
    }
    const double ok = static_cast<double>(row.ok_reps);
    row.mean_beta = sum_beta / ok;
    row.sqrt_n_mse_beta = std::sqrt(n * sum_sq_err / ok);
    row.coverage_pct = 100.0 * static_cast<double>(covered) / ok;
    row.abs_bias = std::abs(row.mean_beta - spec.beta);
    row.mean_abs_error = sum_abs_err / ok;
    row.mse_theta = sum_mse / ok;
    row.mean_se = sum_se / ok;
    double ss = 0.0;
    for (std::size_t r = 0; r < table.reps; ++r) {
      const MethodOutcome& c = table.at(r, k);
      if (c.ok) ss += (c.beta_hat - row.mean_beta) * (c.beta_hat - row.mean_beta);
    }
    row.sd_beta = row.ok_reps > 1 ? std::sqrt(ss / (ok - 1.0)) : 0.0;
    report.rows.push_back(row);
  }
  return report;
}

SimReport run_monte_carlo(const DgpSpec& spec, std::span<const Method> methods,
                          const MonteCarloOptions& opts) {
  return summarize_replications(spec, run_replications(spec, methods, opts), opts);
}

SimReport run_coverage(const DgpSpec& spec, std::span<const Method> methods,
                       std::span<const double> grid, const MonteCarloOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("coverage grid is empty");
  const ReplicationTable table = run_replications(spec, methods, opts);
  SimReport report = summarize_replications(spec, table, opts);
  report.curve = coverage_curve(table, grid, opts.workers);
  return report;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("grid needs lo <= hi and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 1000000) throw std::invalid_argument("grid too large");
  std::vector<double> grid(count);
  for (std::size_t g = 0; g < count; ++g) grid[g] = lo + static_cast<double>(g) * step;
  return grid;
}

}  // namespace shrinkreg
