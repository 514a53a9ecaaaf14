#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shrinkreg/dgp.hpp"
#include "shrinkreg/method.hpp"
#include "shrinkreg/regression.hpp"

namespace shrinkreg {

inline constexpr int kSchemaVersion = 1;

enum class Command { Estimate, Simulate, Coverage };
enum class OutputFormat { Json, Csv, Both };

struct GridSpec {
  double lo = 0.5;
  double hi = 1.5;
  double step = 0.05;

  std::vector<double> values() const;
};

/// Parses "LO:HI:STEP".
GridSpec parse_grid(const std::string& text);

/// Everything one CLI invocation needs. Config files fill it first, flags
/// override afterwards.
struct RunConfig {
  Command command = Command::Simulate;
  std::string name;
  std::optional<DgpSpec> dgp;
  std::optional<std::filesystem::path> measurements;
  std::optional<std::filesystem::path> outcomes;
  std::vector<Method> methods;
  double level = 0.05;
  std::optional<std::uint64_t> seed;
  std::size_t reps = 3000;
  std::filesystem::path out_dir = ".";
  OutputFormat format = OutputFormat::Both;
  int workers = 0;
  std::optional<GridSpec> grid;
  VarianceEstimator variance = VarianceEstimator::EHW;

  /// Throws std::invalid_argument when the command's requirements are not met.
  void validate() const;
};

nlohmann::json dgp_to_json(const DgpSpec& spec);
DgpSpec dgp_from_json(const nlohmann::json& j);

/// Applies the fields present in a config document to `cfg`. Relative
/// data paths are resolved against `base_dir`. Throws std::invalid_argument
/// on schema errors.
void apply_config(const nlohmann::json& doc, const std::filesystem::path& base_dir, RunConfig& cfg);

/// Finds a config by path, or by preset name ("table1_n1000" or
/// "table1_n1000.json") in the bundled preset directory.
std::filesystem::path resolve_config_path(const std::string& name_or_path);

std::filesystem::path preset_dir();

/// Names of bundled presets, sorted.
std::vector<std::string> preset_names();

/// Loads a bundled preset or config file into a fresh RunConfig.
RunConfig load_config(const std::string& name_or_path);

}  // namespace shrinkreg
