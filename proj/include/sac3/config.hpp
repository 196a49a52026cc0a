#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "sac3/types.hpp"

namespace sac3 {

// Tunable knobs of the detector. Field names match the JSON config file
// one-to-one; unknown keys in a config file are rejected.
struct DetectorConfig {
  int k = 10;      // perturbed question count
  int n_s = 10;    // stochastic self-samples from the target
  int n_m = 1;     // verifier samples on the original question
  int n_q = 1;     // target samples per perturbed question
  int n_qm = 1;    // verifier samples per perturbed question
  double lambda_weight = 1.0;  // verifier weight in the combined score ("lambda")
  double threshold = 0.5;
  double temp_deterministic = 0.0;
  double temp_sampling = 1.0;
  std::string target_model = "gpt-3.5-turbo";
  std::string verifier_model = "guanaco-33b";
  std::string checker_model;  // empty: the target model acts as judge
  bool normalize_all = true;
  std::int64_t seed = 0;

  int max_tokens = 256;

  // The judge model id actually used for equivalence checks.
  const std::string& checker_or_target() const {
    return checker_model.empty() ? target_model : checker_model;
  }
};

// Returns the config unchanged if every invariant holds; throws ConfigError
// naming the first violated invariant otherwise.
DetectorConfig validate_config(const DetectorConfig& config);

nlohmann::json config_to_json(const DetectorConfig& config);

// Strict parse: any unknown key is an error. Missing keys keep defaults.
DetectorConfig config_from_json(const nlohmann::json& j);

DetectorConfig load_config(const std::filesystem::path& path);
void save_config(const DetectorConfig& config, const std::filesystem::path& path);

}  // namespace sac3
