#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "shrinkreg/config.hpp"
#include "shrinkreg/montecarlo.hpp"
#include "shrinkreg/report_io.hpp"
#include "shrinkreg/rng.hpp"

using namespace shrinkreg;

namespace {

DgpSpec table1_spec(std::size_t n = 1000, std::size_t j = 20) {
  DgpSpec s;
  s.n = n;
  s.count_law = FixedCount{j};
  s.variance_law = TwoPointUniform{1.0, 10.0};
  return s;
}

DgpSpec correlated_spec(double gamma) {
  DgpSpec s;
  s.n = 1000;
  s.count_law = CorrelatedPairCount{};
  s.variance_law = CorrelatedPairVariance{gamma};
  s.dependence = Dependence::JSigmaCorrelated;
  return s;
}

}  // namespace

TEST_CASE("seed mixing is a pure function of (master, replication)") {
  CHECK(replication_seed(42, 7) == replication_seed(42, 7));
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 10000; ++r) seen.insert(replication_seed(42, r));
  CHECK(seen.size() == 10000);
  CHECK(replication_seed(1, 0) != replication_seed(2, 0));
}

TEST_CASE("DgpSpec validation") {
  DgpSpec s = table1_spec();
  CHECK_NOTHROW(s.validate());
  s.dependence = Dependence::JSigmaCorrelated;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = correlated_spec(0.0);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = correlated_spec(1.0);
  CHECK_NOTHROW(s.validate());
  s.dependence = Dependence::Independent;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = table1_spec(2);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("draw_panel: fixed J and truth alignment") {
  const auto sim = draw_panel(table1_spec(), 5);
  REQUIRE(sim.panel.size() == 1000);
  for (const Unit& u : sim.panel.units()) CHECK(u.count() == 20);
  for (double s2 : sim.truth.sigma2) CHECK((s2 == 1.0 || s2 == 10.0));
  CHECK(sim.panel[0].id == "u1");
  CHECK(sim.panel[999].id == "u1000");
}

TEST_CASE("draw_summary consumes the same stream as draw_panel") {
  for (const DgpSpec& spec : {table1_spec(50, 7), correlated_spec(0.5)}) {
    const auto full = draw_panel(spec, 123);
    const auto fast = draw_summary(spec, 123);
    const PanelSummary ref = summarize(full.panel);
    REQUIRE(ref.size() == fast.summary.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(ref.units[i].mean == fast.summary.units[i].mean);
      CHECK(ref.units[i].sum_sq_dev == fast.summary.units[i].sum_sq_dev);
      CHECK(ref.units[i].half_first == fast.summary.units[i].half_first);
    }
    CHECK(full.panel.outcomes() == fast.outcomes);
    CHECK(full.truth.theta == fast.truth.theta);
  }
}

TEST_CASE("centered gamma noise: moments") {
  DgpSpec spec;
  spec.n = 1000;
  spec.count_law = FixedCount{1000};
  spec.variance_law = TwoPointUniform{4.0, 4.0};
  spec.noise = NoiseFamily::GammaCentered;
  const auto sim = draw_panel(spec, 31);
  double sum = 0.0, sumsq = 0.0, cube = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < sim.panel.size(); ++i) {
    for (double x : sim.panel[i].measurements) {
      const double e = x - sim.truth.theta[i];
      sum += e;
      sumsq += e * e;
      cube += e * e * e;
      ++count;
    }
  }
  const double n = static_cast<double>(count);
  const double m = sum / n;
  const double var = sumsq / n - m * m;
  CHECK(std::abs(m) < 3.0 * 2.0 / std::sqrt(n));
  CHECK(std::abs(var / 4.0 - 1.0) < 0.01);
  CHECK(cube / n > 0.0);  // right skewed
}

TEST_CASE("correlated pair: frequencies and joint values") {
  const auto spec = correlated_spec(1.0);
  const auto sim = draw_panel(spec, 8);
  const std::size_t big_j = static_cast<std::size_t>(std::floor(2.0 * std::sqrt(1000.0)));
  const std::size_t small_j = static_cast<std::size_t>(std::floor(2.0 / 3.0 * std::sqrt(1000.0)));
  CHECK(big_j == 63);
  CHECK(small_j == 21);
  std::size_t high = 0;
  for (std::size_t i = 0; i < sim.truth.counts.size(); ++i) {
    if (sim.truth.counts[i] == big_j) {
      CHECK(sim.truth.sigma2[i] == 12.0);
      ++high;
    } else {
      CHECK(sim.truth.counts[i] == small_j);
      CHECK(sim.truth.sigma2[i] == 8.0);
    }
  }
  const double freq = static_cast<double>(high) / 1000.0;
  CHECK(std::abs(freq - 0.5) < 3.0 * std::sqrt(0.25 / 1000.0));
}

TEST_CASE("Poisson counts are floored") {
  DgpSpec spec;
  spec.n = 2000;
  spec.count_law = PoissonCount{1.0, 2};
  const auto sim = draw_summary(spec, 4);
  std::size_t at_floor = 0;
  for (auto c : sim.truth.counts) {
    CHECK(c >= 2);
    at_floor += c == 2;
  }
  CHECK(at_floor > 1000);  // P(Poisson(1) <= 2) ≈ 0.92
}

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  const std::vector<Method> methods{Method::Oracle, Method::SemiOracle, Method::HE, Method::HO,
                                    Method::CW_BC, Method::CW_IV, Method::FE};
  MonteCarloOptions opts;
  opts.reps = 64;
  opts.master_seed = 2718;
  const DgpSpec spec = table1_spec(200, 10);
  const ReplicationTable ref = serial::run_replications(spec, methods, opts);
  for (int workers : {1, 3, 8}) {
    opts.workers = workers;
    CHECK(run_replications(spec, methods, opts) == ref);
  }
  const std::vector<double> grid = make_grid(0.5, 1.5, 0.01);
  const CoverageCurve sc = serial::coverage_curve(ref, grid);
  const CoverageCurve pc = coverage_curve(ref, grid, 4);
  CHECK(sc.coverage == pc.coverage);

  opts.workers = 1;
  const std::string a = to_json(run_coverage(spec, methods, grid, opts)).dump();
  opts.workers = 8;
  const std::string b = to_json(run_coverage(spec, methods, grid, opts)).dump();
  CHECK(a == b);
}

TEST_CASE("replication r is reproducible in isolation") {
  const std::vector<Method> methods{Method::HE, Method::FE};
  MonteCarloOptions opts;
  opts.reps = 10;
  opts.master_seed = 99;
  const DgpSpec spec = table1_spec(100, 10);
  const auto table = run_replications(spec, methods, opts);
  std::vector<MethodOutcome> cell(2);
  run_replication(spec, methods, opts.level, replication_seed(99, 7), cell);
  CHECK(cell[0] == table.at(7, 0));
}

TEST_CASE("S = 1 smoke run and degenerate grids") {
  const std::vector<Method> methods{Method::HE, Method::FE, Method::Oracle};
  MonteCarloOptions opts;
  opts.reps = 1;
  opts.master_seed = 3;
  const std::vector<double> grid{-100.0, 1.0, 100.0};
  const SimReport r = run_coverage(table1_spec(), methods, grid, opts);
  for (const auto& row : r.rows) {
    CHECK((row.coverage_pct == 0.0 || row.coverage_pct == 100.0));
    CHECK(row.sqrt_n_mse_beta >= 0.0);
  }
  REQUIRE(r.curve);
  for (std::size_t k = 0; k < methods.size(); ++k) {
    CHECK(r.curve->at(0, k) == 0.0);
    CHECK(r.curve->at(2, k) == 0.0);
  }
  CHECK_THROWS_AS(run_coverage(table1_spec(), methods, std::vector<double>{}, opts), std::invalid_argument);
  opts.reps = 0;
  CHECK_THROWS_AS(run_monte_carlo(table1_spec(), methods, opts), std::invalid_argument);
}

TEST_CASE("make_grid") {
  const auto g = make_grid(0.5, 1.5, 0.05);
  REQUIRE(g.size() == 21);
  CHECK(g.front() == 0.5);
  CHECK(g.back() == doctest::Approx(1.5));
  CHECK(make_grid(1.0, 1.0, 0.1).size() == 1);
  CHECK_THROWS(make_grid(1.0, 0.0, 0.1));
  CHECK_THROWS(make_grid(0.0, 1.0, 0.0));
}

TEST_CASE("failed replications are excluded and counted") {
  DgpSpec spec;
  spec.n = 5;
  spec.count_law = FixedCount{2};
  spec.effect_law.sd = 0.1;
  spec.variance_law = TwoPointUniform{10.0, 10.0};
  const std::vector<Method> methods{Method::HE, Method::FE};
  MonteCarloOptions opts;
  opts.reps = 200;
  const SimReport r = run_monte_carlo(spec, methods, opts);
  const auto* he = r.row(Method::HE);
  const auto* fe = r.row(Method::FE);
  CHECK(he->failed_reps > 0);
  CHECK(he->ok_reps + he->failed_reps == 200);
  CHECK(fe->failed_reps == 0);
  CHECK(he->coverage_pct >= 0.0);
  CHECK(he->coverage_pct <= 100.0);
}

TEST_CASE("metric definitions on a hand-checked table") {
  ReplicationTable t;
  t.methods = {Method::FE};
  t.reps = 3;
  t.cells = {{true, 0.9, 0.1, 0.8, 1.0, 0.5}, {true, 1.2, 0.1, 1.1, 1.3, 0.3}, {false, 0, 0, 0, 0, 0}};
  DgpSpec spec = table1_spec(100);
  MonteCarloOptions opts;
  opts.reps = 3;
  const SimReport r = summarize_replications(spec, t, opts);
  const auto& row = r.rows[0];
  CHECK(row.ok_reps == 2);
  CHECK(row.failed_reps == 1);
  CHECK(row.coverage_pct == 50.0);
  CHECK(row.mean_beta == doctest::Approx(1.05));
  CHECK(row.abs_bias == doctest::Approx(0.05));
  CHECK(row.mean_abs_error == doctest::Approx(0.15));
  CHECK(row.sqrt_n_mse_beta == doctest::Approx(std::sqrt(100.0 * (0.01 + 0.04) / 2.0)));
  CHECK(row.mse_theta == doctest::Approx(0.4));
}

// Statistical properties of the designs, at the replication counts used for
// the published comparisons.

TEST_CASE("FE attenuates in every design") {
  const std::vector<Method> methods{Method::FE};
  MonteCarloOptions opts;
  opts.reps = 300;
  opts.master_seed = 5;
  for (const char* preset : {"fig1_normal", "fig1_gamma", "table1_n50", "table1_n225", "table1_n1000",
                             "fig2_independent", "fig2_correlated"}) {
    const RunConfig cfg = load_config(preset);
    const SimReport r = run_monte_carlo(*cfg.dgp, methods, opts);
    INFO(preset);
    CHECK(r.rows[0].mean_beta < cfg.dgp->beta);
  }
}

TEST_CASE("HO amplifies under J-sigma correlation, HE stays centered (gamma = 0.5)") {
  const std::vector<Method> methods{Method::HO, Method::HE};
  MonteCarloOptions opts;
  opts.reps = 3000;
  opts.master_seed = 11;
  const SimReport r = run_monte_carlo(correlated_spec(0.5), methods, opts);
  const auto* ho = r.row(Method::HO);
  const auto* he = r.row(Method::HE);
  const double se_ho = ho->sd_beta / std::sqrt(static_cast<double>(ho->ok_reps));
  const double se_he = he->sd_beta / std::sqrt(static_cast<double>(he->ok_reps));
  // one-sided p < 0.01
  CHECK((ho->mean_beta - 1.0) / se_ho > 2.3263);
  CHECK(std::abs(he->mean_beta - 1.0) < 3.0 * se_he);
}

TEST_CASE("Independent Poisson J: HO and HE coverage inside the binomial 99% band") {
  const RunConfig cfg = load_config("fig2_independent");
  const std::vector<Method> methods{Method::HO, Method::HE};
  MonteCarloOptions opts;
  opts.reps = 3000;
  opts.master_seed = 12;
  const SimReport r = run_monte_carlo(*cfg.dgp, methods, opts);
  const auto [lo, hi] = oracle::binomial_band(3000, 0.95, 0.99);
  for (const auto& row : r.rows) {
    INFO(to_string(row.method));
    CHECK(row.coverage_pct / 100.0 >= lo);
    CHECK(row.coverage_pct / 100.0 <= hi);
  }
}
