#include "shrinkreg/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "shrinkreg/montecarlo.hpp"

namespace shrinkreg {

using nlohmann::json;

std::vector<double> GridSpec::values() const { return make_grid(lo, hi, step); }

GridSpec parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
  if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
    throw std::invalid_argument("grid must be LO:HI:STEP, got '" + text + "'");
  }
  GridSpec g;
  try {
    std::size_t used = 0;
    const std::string parts[3] = {text.substr(0, a), text.substr(a + 1, b - a - 1), text.substr(b + 1)};
    double* dst[3] = {&g.lo, &g.hi, &g.step};
    for (int i = 0; i < 3; ++i) {
      *dst[i] = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing characters");
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("grid must be LO:HI:STEP, got '" + text + "'");
  }
  (void)g.values();  // range check
  return g;
}

void RunConfig::validate() const {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  if (methods.empty()) throw std::invalid_argument("no methods requested");
  if (command == Command::Estimate) {
    if (!measurements || !outcomes) {
      throw std::invalid_argument("estimate needs --measurements and --outcomes (or a config with both)");
    }
    for (Method m : methods) {
      if (!is_feasible(m)) {
        throw std::invalid_argument(std::string(to_string(m)) + " is only available in simulations");
      }
    }
  } else {
    if (!dgp) throw std::invalid_argument("simulate/coverage need a config with a 'dgp' section");
    dgp->validate();
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
    if (command == Command::Coverage && !grid) throw std::invalid_argument("coverage needs --grid");
  }
  if (workers < 0) throw std::invalid_argument("workers must be nonnegative");
}

// ---------------------------------------------------------------------------
// DGP (de)serialization

namespace {

std::string kind_of(const json& j, const char* where) {
  if (!j.is_object() || !j.contains("kind")) {
    throw std::invalid_argument(std::string(where) + ": expected an object with 'kind'");
  }
  return j.at("kind").get<std::string>();
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw std::invalid_argument(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace

json dgp_to_json(const DgpSpec& s) {
  json j;
  j["n"] = s.n;
  std::visit(
      [&](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, FixedCount>) {
          j["j_law"] = {{"kind", "fixed"}, {"j", law.j}};
        } else if constexpr (std::is_same_v<T, PoissonCount>) {
          j["j_law"] = {{"kind", "poisson"}, {"mean", law.mean}, {"floor", law.floor}};
        } else {
          j["j_law"] = {{"kind", "correlated_pair"}};
        }
      },
      s.count_law);
  j["theta_law"] = {{"kind", "normal"}, {"mean", s.effect_law.mean}, {"sd", s.effect_law.sd}};
  std::visit(
      [&](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, ChiSquared1>) {
          j["sigma2_law"] = {{"kind", "chisq1"}};
        } else if constexpr (std::is_same_v<T, TwoPointUniform>) {
          j["sigma2_law"] = {{"kind", "uniform_two_point"}, {"lo", law.lo}, {"hi", law.hi}};
        } else {
          j["sigma2_law"] = {{"kind", "correlated_pair"}, {"gamma", law.gamma}};
        }
      },
      s.variance_law);
  j["noise_family"] = s.noise == NoiseFamily::Normal ? "normal" : "gamma_centered";
  j["alpha"] = s.alpha;
  j["beta"] = s.beta;
  j["u_law"] = {{"kind", "normal"}, {"sd", s.u_sd}};
  j["dependence"] = s.dependence == Dependence::Independent ? "independent" : "j_sigma_correlated";
  return j;
}

DgpSpec dgp_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("dgp: expected an object");
  reject_unknown_keys(j, {"n", "j_law", "theta_law", "sigma2_law", "noise_family", "alpha", "beta",
                          "u_law", "dependence"},
                      "dgp");
  DgpSpec s;
  try {
    s.n = j.at("n").get<std::size_t>();

    const json& jl = j.at("j_law");
    const std::string jk = kind_of(jl, "j_law");
    if (jk == "fixed") {
      s.count_law = FixedCount{jl.at("j").get<std::size_t>()};
    } else if (jk == "poisson") {
      PoissonCount p;
      p.mean = jl.at("mean").get<double>();
      p.floor = jl.value("floor", std::size_t{2});
      s.count_law = p;
    } else if (jk == "correlated_pair") {
      s.count_law = CorrelatedPairCount{};
    } else {
      throw std::invalid_argument("j_law: unknown kind '" + jk + "'");
    }

    if (j.contains("theta_law")) {
      const json& tl = j.at("theta_law");
      if (kind_of(tl, "theta_law") != "normal") throw std::invalid_argument("theta_law: only 'normal' is supported");
      s.effect_law.mean = tl.value("mean", 0.0);
      s.effect_law.sd = tl.value("sd", 1.0);
    }

    const json& vl = j.at("sigma2_law");
    const std::string vk = kind_of(vl, "sigma2_law");
    if (vk == "chisq1") {
      s.variance_law = ChiSquared1{};
    } else if (vk == "uniform_two_point") {
      s.variance_law = TwoPointUniform{vl.at("lo").get<double>(), vl.at("hi").get<double>()};
    } else if (vk == "correlated_pair") {
      s.variance_law = CorrelatedPairVariance{vl.at("gamma").get<double>()};
    } else {
      throw std::invalid_argument("sigma2_law: unknown kind '" + vk + "'");
    }

    const std::string noise = j.value("noise_family", std::string("normal"));
    if (noise == "normal") {
      s.noise = NoiseFamily::Normal;
    } else if (noise == "gamma_centered") {
      s.noise = NoiseFamily::GammaCentered;
    } else {
      throw std::invalid_argument("noise_family: unknown value '" + noise + "'");
    }

    s.alpha = j.value("alpha", 0.0);
    s.beta = j.value("beta", 1.0);
    if (j.contains("u_law")) {
      const json& ul = j.at("u_law");
      if (kind_of(ul, "u_law") != "normal") throw std::invalid_argument("u_law: only 'normal' is supported");
      s.u_sd = ul.value("sd", 1.0);
    }

    const std::string dep = j.value("dependence", std::string("independent"));
    if (dep == "independent") {
      s.dependence = Dependence::Independent;
    } else if (dep == "j_sigma_correlated") {
      s.dependence = Dependence::JSigmaCorrelated;
    } else {
      throw std::invalid_argument("dependence: unknown value '" + dep + "'");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("dgp: ") + e.what());
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Run configs

void apply_config(const json& doc, const std::filesystem::path& base_dir, RunConfig& cfg) {
  if (!doc.is_object()) throw std::invalid_argument("config: expected a JSON object");
  reject_unknown_keys(doc, {"schema_version", "name", "description", "dgp", "methods", "reps", "level",
                            "seed", "grid", "measurements", "outcomes", "variance", "format", "workers"},
                      "config");
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw std::invalid_argument("config: unsupported schema_version " + std::to_string(version));
    }
    if (doc.contains("name")) cfg.name = doc["name"].get<std::string>();
    if (doc.contains("dgp")) cfg.dgp = dgp_from_json(doc["dgp"]);
    if (doc.contains("methods")) {
      cfg.methods.clear();
      std::string joined;
      for (const auto& m : doc["methods"]) joined += m.get<std::string>() + ",";
      cfg.methods = parse_method_list(joined);
    }
    if (doc.contains("reps")) cfg.reps = doc["reps"].get<std::size_t>();
    if (doc.contains("level")) cfg.level = doc["level"].get<double>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("workers")) cfg.workers = doc["workers"].get<int>();
    if (doc.contains("grid")) {
      const json& g = doc["grid"];
      if (g.is_string()) {
        cfg.grid = parse_grid(g.get<std::string>());
      } else {
        cfg.grid = GridSpec{g.at("lo").get<double>(), g.at("hi").get<double>(), g.at("step").get<double>()};
        (void)cfg.grid->values();
      }
    }
    if (doc.contains("measurements")) cfg.measurements = base_dir / doc["measurements"].get<std::string>();
    if (doc.contains("outcomes")) cfg.outcomes = base_dir / doc["outcomes"].get<std::string>();
    if (doc.contains("variance")) {
      const std::string v = doc["variance"].get<std::string>();
      if (v == "ehw") cfg.variance = VarianceEstimator::EHW;
      else if (v == "cluster") cfg.variance = VarianceEstimator::Cluster;
      else throw std::invalid_argument("config: variance must be 'ehw' or 'cluster'");
    }
    if (doc.contains("format")) {
      const std::string f = doc["format"].get<std::string>();
      if (f == "json") cfg.format = OutputFormat::Json;
      else if (f == "csv") cfg.format = OutputFormat::Csv;
      else if (f == "both") cfg.format = OutputFormat::Both;
      else throw std::invalid_argument("config: format must be json, csv or both");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("SHRINKREG_PRESET_DIR"); env && *env) return env;
  return SHRINKREG_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(preset_dir(), ec)) {
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::filesystem::path resolve_config_path(const std::string& name_or_path) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::is_regular_file(direct)) return direct;
  std::filesystem::path preset = preset_dir() / direct.filename();
  if (preset.extension() != ".json") preset += ".json";
  if (std::filesystem::is_regular_file(preset)) return preset;
  throw std::invalid_argument("config not found: '" + name_or_path + "' (not a file, not a bundled preset)");
}

RunConfig load_config(const std::string& name_or_path) {
  const auto path = resolve_config_path(name_or_path);
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  RunConfig cfg;
  apply_config(doc, path.parent_path(), cfg);
  return cfg;
}

}  // namespace shrinkreg
