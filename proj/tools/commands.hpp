#pragma once

#include <ostream>

#include "shrinkreg/config.hpp"

namespace shrinkreg::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIngestion = 2,
  kEstimatorUndefined = 3,
  kAllRepsFailed = 4,
};

int cmd_estimate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_coverage(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line handling: parsing, config loading, dispatch.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shrinkreg::cli
