#include "sac3/config.hpp"

#include <fstream>
#include <set>
#include <string>

namespace sac3 {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

DetectorConfig validate_config(const DetectorConfig& config) {
  require(config.k >= 0, "negative count: k");
  require(config.n_s >= 0, "negative count: n_s");
  require(config.n_m >= 0, "negative count: n_m");
  require(config.n_q >= 0, "negative count: n_q");
  require(config.n_qm >= 0, "negative count: n_qm");
  require(config.lambda_weight >= 0.0, "negative weight: lambda");
  require(config.threshold >= 0.0 && config.threshold <= 1.0,
          "threshold out of range");
  require(config.temp_deterministic >= 0.0, "negative temperature: temp_deterministic");
  require(config.temp_sampling >= 0.0, "negative temperature: temp_sampling");
  require(config.max_tokens > 0, "max_tokens must be positive");

  const bool any_self = config.n_s > 0;
  const bool any_verifier = config.n_m > 0;
  const bool any_cross = config.k > 0 && (config.n_q > 0 || config.n_qm > 0);
  require(any_self || any_verifier || any_cross, "no samples configured");
  return config;
}

nlohmann::json config_to_json(const DetectorConfig& c) {
  return nlohmann::json{
      {"k", c.k},
      {"n_s", c.n_s},
      {"n_m", c.n_m},
      {"n_q", c.n_q},
      {"n_qm", c.n_qm},
      {"lambda", c.lambda_weight},
      {"threshold", c.threshold},
      {"temp_deterministic", c.temp_deterministic},
      {"temp_sampling", c.temp_sampling},
      {"target_model", c.target_model},
      {"verifier_model", c.verifier_model},
      {"checker_model", c.checker_model},
      {"normalize_all", c.normalize_all},
      {"seed", c.seed},
      {"max_tokens", c.max_tokens},
  };
}

DetectorConfig config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "k", "n_s", "n_m", "n_q", "n_qm", "lambda", "threshold",
      "temp_deterministic", "temp_sampling", "target_model", "verifier_model",
      "checker_model", "normalize_all", "seed", "max_tokens"};

  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw ConfigError("unknown config key: " + item.key());
    }
  }

  DetectorConfig c;
  try {
    c.k = j.value("k", c.k);
    c.n_s = j.value("n_s", c.n_s);
    c.n_m = j.value("n_m", c.n_m);
    c.n_q = j.value("n_q", c.n_q);
    c.n_qm = j.value("n_qm", c.n_qm);
    c.lambda_weight = j.value("lambda", c.lambda_weight);
    c.threshold = j.value("threshold", c.threshold);
    c.temp_deterministic = j.value("temp_deterministic", c.temp_deterministic);
    c.temp_sampling = j.value("temp_sampling", c.temp_sampling);
    c.target_model = j.value("target_model", c.target_model);
    c.verifier_model = j.value("verifier_model", c.verifier_model);
    c.checker_model = j.value("checker_model", c.checker_model);
    c.normalize_all = j.value("normalize_all", c.normalize_all);
    c.seed = j.value("seed", c.seed);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed config value: ") + ex.what());
  }
  return c;
}

DetectorConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError("invalid config JSON: " + std::string(ex.what()));
  }
  return config_from_json(j);
}

void save_config(const DetectorConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path.string());
  out << config_to_json(config).dump(2) << "\n";
}

}  // namespace sac3
