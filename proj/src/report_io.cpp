#include "shrinkreg/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "shrinkreg/config.hpp"

namespace shrinkreg {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const VarianceComponents& vc) {
  return {{"sigma2_i", vc.sigma2_i},
          {"sigma2_pooled", vc.sigma2_pooled},
          {"sigma2_theta", vc.sigma2_theta},
          {"v_hat", vc.v_hat},
          {"kappa_hat", vc.kappa_hat},
          {"sample_var_means", vc.sample_var_means}};
}

json to_json(const RegressionReport& r) {
  return {{"alpha_hat", r.alpha_hat},
          {"beta_hat", r.beta_hat},
          {"control_coefs", r.control_coefs},
          {"omega", r.omega},
          {"se_beta", r.se_beta},
          {"variance_estimator", r.variance_estimator == VarianceEstimator::EHW ? "EHW" : "CLUSTER"},
          {"level", r.level},
          {"ci_low", r.ci_low},
          {"ci_high", r.ci_high},
          {"p_value", r.p_value},
          {"n", r.n},
          {"residuals", r.residuals}};
}

json to_json(const ShrinkageResult& r) {
  return {{"method", std::string(to_string(r.method))},
          {"target", r.target},
          {"weights", r.weights},
          {"estimates", r.estimates}};
}

json to_json(const SimReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"method", std::string(to_string(row.method))},
                    {"ok_reps", row.ok_reps},
                    {"failed_reps", row.failed_reps},
                    {"sqrt_n_mse_beta", number_or_null(row.sqrt_n_mse_beta)},
                    {"coverage_pct", number_or_null(row.coverage_pct)},
                    {"abs_bias", number_or_null(row.abs_bias)},
                    {"mean_abs_error", number_or_null(row.mean_abs_error)},
                    {"mse_theta", number_or_null(row.mse_theta)},
                    {"mean_beta", number_or_null(row.mean_beta)},
                    {"sd_beta", number_or_null(row.sd_beta)},
                    {"mean_se", number_or_null(row.mean_se)}});
  }
  json out = {{"schema_version", kSchemaVersion},
              {"dgp", dgp_to_json(r.spec)},
              {"reps", r.reps},
              {"level", r.level},
              {"master_seed", r.master_seed},
              {"methods", rows}};
  if (r.curve) {
    json curve = json::array();
    for (std::size_t g = 0; g < r.curve->grid.size(); ++g) {
      json point = {{"beta", r.curve->grid[g]}};
      for (std::size_t k = 0; k < r.curve->methods.size(); ++k) {
        point[std::string(to_string(r.curve->methods[k]))] = number_or_null(r.curve->at(g, k));
      }
      curve.push_back(point);
    }
    out["coverage_curve"] = curve;
  }
  return out;
}

void write_shrinkage_csv(std::ostream& os, const PanelData& panel,
                         std::span<const ShrinkageResult> results) {
  os << "unit_id,method,weight,theta_hat\n";
  for (const auto& res : results) {
    for (std::size_t i = 0; i < panel.size(); ++i) {
      os << panel[i].id << ',' << to_string(res.method) << ',' << format_number(res.weights[i]) << ','
         << format_number(res.estimates[i]) << '\n';
    }
  }
}

void write_regression_csv(std::ostream& os, std::span<const NamedReport> reports) {
  os << "method,beta,se,ci_low,ci_high,p\n";
  for (const auto& [method, r] : reports) {
    os << to_string(method) << ',' << format_number(r.beta_hat) << ',' << format_number(r.se_beta) << ','
       << format_number(r.ci_low) << ',' << format_number(r.ci_high) << ',' << format_number(r.p_value)
       << '\n';
  }
}

void write_sim_csv(std::ostream& os, const SimReport& r) {
  os << "method,sqrt_n_mse_beta,coverage_pct,abs_bias,mse_theta,mean_abs_error,mean_beta,sd_beta,"
        "mean_se,ok_reps,failed_reps\n";
  for (const auto& row : r.rows) {
    os << to_string(row.method) << ',' << format_number(row.sqrt_n_mse_beta) << ','
       << format_number(row.coverage_pct) << ',' << format_number(row.abs_bias) << ','
       << format_number(row.mse_theta) << ',' << format_number(row.mean_abs_error) << ','
       << format_number(row.mean_beta) << ',' << format_number(row.sd_beta) << ','
       << format_number(row.mean_se) << ',' << row.ok_reps << ',' << row.failed_reps << '\n';
  }
}

void write_curve_csv(std::ostream& os, const CoverageCurve& curve) {
  os << "beta,method,coverage\n";
  for (std::size_t g = 0; g < curve.grid.size(); ++g) {
    for (std::size_t k = 0; k < curve.methods.size(); ++k) {
      os << format_number(curve.grid[g]) << ',' << to_string(curve.methods[k]) << ','
         << format_number(curve.at(g, k)) << '\n';
    }
  }
}

std::string format_sim_table(const SimReport& r) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %16s %13s %9s %11s %14s %8s\n", "Method", "sqrt(n*MSE(b))",
                "Coverage(%)", "Bias", "MSE(theta)", "mean|b-beta|", "failed");
  os << line;
  for (const auto& row : r.rows) {
    std::snprintf(line, sizeof line, "%-12s %16.3f %13.2f %9.3f %11.3f %14.3f %8zu\n",
                  std::string(to_string(row.method)).c_str(), row.sqrt_n_mse_beta, row.coverage_pct,
                  row.abs_bias, row.mse_theta, row.mean_abs_error, row.failed_reps);
    os << line;
  }
  return os.str();
}

}  // namespace shrinkreg
