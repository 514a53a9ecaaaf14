#pragma once

#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "shrinkreg/montecarlo.hpp"
#include "shrinkreg/panel.hpp"
#include "shrinkreg/regression.hpp"
#include "shrinkreg/shrinkage.hpp"

namespace shrinkreg {

/// Shortest decimal that round-trips; "nan"/"inf" for non-finite values.
std::string format_number(double v);

nlohmann::json to_json(const VarianceComponents& vc);
nlohmann::json to_json(const RegressionReport& r);
nlohmann::json to_json(const ShrinkageResult& r);
nlohmann::json to_json(const SimReport& r);

/// `unit_id,method,weight,theta_hat`, one row per unit and method.
void write_shrinkage_csv(std::ostream& os, const PanelData& panel,
                         std::span<const ShrinkageResult> results);

struct NamedReport {
  Method method;
  RegressionReport report;
};

/// `method,beta,se,ci_low,ci_high,p`.
void write_regression_csv(std::ostream& os, std::span<const NamedReport> reports);

/// One row per method: method, failed_reps and every metric.
void write_sim_csv(std::ostream& os, const SimReport& r);

/// `beta,method,coverage` in grid order.
void write_curve_csv(std::ostream& os, const CoverageCurve& curve);

/// Aligned text table: √(n·MSE(β)), coverage %, bias, MSE(θ), then extras.
std::string format_sim_table(const SimReport& r);

}  // namespace shrinkreg
