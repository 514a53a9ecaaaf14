#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "shrinkreg/errors.hpp"
#include "shrinkreg/montecarlo.hpp"
#include "shrinkreg/panel.hpp"
#include "shrinkreg/regression.hpp"
#include "shrinkreg/report_io.hpp"
#include "shrinkreg/shrinkage.hpp"

namespace shrinkreg::cli {

using nlohmann::json;

namespace {

bool wants_json(OutputFormat f) { return f != OutputFormat::Csv; }
bool wants_csv(OutputFormat f) { return f != OutputFormat::Json; }

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  return os;
}

Eigen::MatrixXd controls_matrix(const PanelData& panel) {
  const auto n = static_cast<Eigen::Index>(panel.size());
  const auto k = static_cast<Eigen::Index>(panel.num_controls());
  Eigen::MatrixXd c(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) c(i, j) = panel[static_cast<std::size_t>(i)].controls[static_cast<std::size_t>(j)];
  }
  return c;
}

std::uint64_t effective_seed(const RunConfig& cfg) { return cfg.seed.value_or(0); }

}  // namespace

int cmd_estimate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::optional<PanelData> panel;
  try {
    panel.emplace(load_panel(*cfg.measurements, *cfg.outcomes));
  } catch (const DataError& e) {
    err << "ingestion error: " << e.what() << '\n';
    return kIngestion;
  }
  if (cfg.variance == VarianceEstimator::Cluster && !panel->has_clusters()) {
    err << "ingestion error: cluster variance requested but outcomes file has no 'cluster' column\n";
    return kIngestion;
  }

  const PanelSummary summary = summarize(*panel);
  json components;
  if (summary.min_count() >= 2) {
    components = to_json(variance_components(summary));
  } else {
    components = {{"kappa_hat", kappa_hat(summary)}};
  }

  std::vector<ShrinkageResult> results;
  std::vector<NamedReport> reports;
  const Eigen::MatrixXd controls = controls_matrix(*panel);
  const std::vector<double> y = panel->outcomes();
  const std::vector<std::string> clusters = panel->cluster_labels();
  try {
    for (Method m : cfg.methods) {
      results.push_back(estimate(summary, m));
      reports.push_back({m, regress(results.back().estimates, y, cfg.level, cfg.variance, controls, clusters)});
    }
  } catch (const EstimatorUndefined& e) {
    err << "estimator undefined: " << e.what() << '\n';
    return kEstimatorUndefined;
  } catch (const std::invalid_argument& e) {
    err << "estimator undefined: " << e.what() << '\n';
    return kEstimatorUndefined;
  }

  std::filesystem::create_directories(cfg.out_dir);
  {
    auto os = open_output(cfg.out_dir, "variance_components.json");
    os << components.dump(2) << '\n';
  }
  if (wants_csv(cfg.format)) {
    auto s = open_output(cfg.out_dir, "shrinkage.csv");
    write_shrinkage_csv(s, *panel, results);
    auto r = open_output(cfg.out_dir, "regression.csv");
    write_regression_csv(r, reports);
  }
  if (wants_json(cfg.format)) {
    json doc = {{"schema_version", kSchemaVersion}, {"n", panel->size()}, {"variance_components", components}};
    json ids = json::array();
    for (const Unit& u : panel->units()) ids.push_back(u.id);
    doc["unit_ids"] = ids;
    doc["shrinkage"] = json::array();
    for (const auto& r : results) doc["shrinkage"].push_back(to_json(r));
    doc["regression"] = json::array();
    for (const auto& [m, r] : reports) {
      json entry = to_json(r);
      entry["method"] = std::string(to_string(m));
      if (panel->num_controls() > 0) entry["note"] = "with controls: beta variance taken from the full sandwich";
      doc["regression"].push_back(entry);
    }
    auto os = open_output(cfg.out_dir, "estimate_report.json");
    os << doc.dump(2) << '\n';
  }

  write_regression_csv(out, reports);
  return kOk;
}

namespace {

int finish_simulation(const RunConfig& cfg, const SimReport& report, std::ostream& out, std::ostream& err) {
  std::filesystem::create_directories(cfg.out_dir);
  if (wants_json(cfg.format)) {
    auto os = open_output(cfg.out_dir, "sim_report.json");
    os << to_json(report).dump(2) << '\n';
  }
  if (wants_csv(cfg.format)) {
    auto os = open_output(cfg.out_dir, "sim_report.csv");
    write_sim_csv(os, report);
    if (report.curve) {
      auto cs = open_output(cfg.out_dir, "coverage_curve.csv");
      write_curve_csv(cs, *report.curve);
    }
  }
  if (!cfg.name.empty()) out << cfg.name << ": ";
  out << "n=" << report.spec.n << " S=" << report.reps << " seed=" << report.master_seed << '\n';
  out << format_sim_table(report);

  int code = kOk;
  for (const auto& row : report.rows) {
    if (row.ok_reps == 0) {
      err << "every replication failed for " << to_string(row.method) << '\n';
      code = kAllRepsFailed;
    } else if (row.failed_reps > 0) {
      err << to_string(row.method) << ": " << row.failed_reps << " of " << report.reps
          << " replications failed (estimator undefined) and were excluded\n";
    }
  }
  return code;
}

MonteCarloOptions options_of(const RunConfig& cfg) {
  MonteCarloOptions opts;
  opts.reps = cfg.reps;
  opts.level = cfg.level;
  opts.master_seed = effective_seed(cfg);
  opts.workers = cfg.workers;
  return opts;
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SimReport report = run_monte_carlo(*cfg.dgp, cfg.methods, options_of(cfg));
  return finish_simulation(cfg, report, out, err);
}

int cmd_coverage(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::vector<double> grid = cfg.grid->values();
  const SimReport report = run_coverage(*cfg.dgp, cfg.methods, grid, options_of(cfg));
  return finish_simulation(cfg, report, out, err);
}

// ---------------------------------------------------------------------------

namespace {

struct Flags {
  std::string config;
  std::string methods;
  std::string seed;
  std::optional<std::size_t> reps;
  std::optional<double> level;
  std::string out;
  std::string format;
  std::optional<int> workers;
  std::string grid;
  std::string measurements;
  std::string outcomes;
  std::string variance;
};

void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "JSON config file or bundled preset name");
  sub.add_option("--methods", f.methods, "Comma-separated methods: fe,ho,he,cw_bc,cw_iv[,oracle,semi_oracle]");
  sub.add_option("--seed", f.seed, "Master seed (u64); falls back to $SHRINKREG_SEED");
  sub.add_option("--level", f.level, "Significance level a of the (1-a) interval, default 0.05");
  sub.add_option("--out", f.out, "Output directory, default '.'");
  sub.add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv", "both"}));
}

void add_simulation(CLI::App& sub, Flags& f) {
  sub.add_option("--reps", f.reps, "Monte Carlo replications S");
  sub.add_option("--workers", f.workers, "Worker threads, default: logical cores")->check(CLI::NonNegativeNumber);
}

std::uint64_t parse_seed(const std::string& text, const char* source) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size()) {
    throw std::invalid_argument(std::string(source) + ": seed must be an unsigned 64-bit integer, got '" + text + "'");
  }
  return v;
}

RunConfig build_config(Command command, const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = load_config(f.config);
  cfg.command = command;
  if (!f.methods.empty()) cfg.methods = parse_method_list(f.methods);
  if (cfg.methods.empty()) {
    cfg.methods = command == Command::Estimate
                      ? std::vector<Method>{Method::FE, Method::HE, Method::CW_BC}
                      : std::vector<Method>{Method::Oracle, Method::HE, Method::CW_BC, Method::FE};
  }
  if (!f.seed.empty()) {
    cfg.seed = parse_seed(f.seed, "--seed");
  } else if (!cfg.seed) {
    if (const char* env = std::getenv("SHRINKREG_SEED"); env && *env) cfg.seed = parse_seed(env, "SHRINKREG_SEED");
  }
  if (f.reps) cfg.reps = *f.reps;
  if (f.level) cfg.level = *f.level;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.format == "json") cfg.format = OutputFormat::Json;
  if (f.format == "csv") cfg.format = OutputFormat::Csv;
  if (f.format == "both") cfg.format = OutputFormat::Both;
  if (f.workers) cfg.workers = *f.workers;
  if (!f.grid.empty()) cfg.grid = parse_grid(f.grid);
  if (!f.measurements.empty()) cfg.measurements = f.measurements;
  if (!f.outcomes.empty()) cfg.outcomes = f.outcomes;
  if (f.variance == "ehw") cfg.variance = VarianceEstimator::EHW;
  if (f.variance == "cluster") cfg.variance = VarianceEstimator::Cluster;
  cfg.validate();
  return cfg;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shrinkage estimators as regressors: estimation, inference and Monte Carlo studies", "shrinkreg"};
  app.require_subcommand(1);
  Flags flags;

  auto* estimate = app.add_subcommand("estimate", "Shrink unit means and regress outcomes on them");
  add_common(*estimate, flags);
  estimate->add_option("--measurements", flags.measurements, "CSV with header unit_id,x");
  estimate->add_option("--outcomes", flags.outcomes, "CSV with header unit_id,y[,cluster][,c1,...]");
  estimate->add_option("--variance", flags.variance, "Variance estimator for beta")
      ->check(CLI::IsMember({"ehw", "cluster"}));

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo bias, MSE and coverage table");
  add_common(*simulate, flags);
  add_simulation(*simulate, flags);

  auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage curves over a beta grid");
  add_common(*coverage, flags);
  add_simulation(*coverage, flags);
  coverage->add_option("--grid", flags.grid, "Beta grid LO:HI:STEP");

  app.add_subcommand("presets", "List bundled preset configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  if (app.got_subcommand("presets")) {
    for (const auto& name : preset_names()) out << name << '\n';
    return kOk;
  }

  Command command = Command::Estimate;
  if (app.got_subcommand(simulate)) command = Command::Simulate;
  if (app.got_subcommand(coverage)) command = Command::Coverage;

  RunConfig cfg;
  try {
    cfg = build_config(command, flags);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    switch (command) {
      case Command::Estimate: return cmd_estimate(cfg, out, err);
      case Command::Simulate: return cmd_simulate(cfg, out, err);
      case Command::Coverage: return cmd_coverage(cfg, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace shrinkreg::cli
