#include "sac3/mock_backend.hpp"

#include <cmath>
#include <fstream>

namespace sac3 {

namespace {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform in [0, 1), fully determined by (seed, prompt, sample_index).
double keyed_uniform(std::uint64_t seed, const std::string& prompt, int sample_index) {
  std::uint64_t key = splitmix64(seed ^ fnv1a64(prompt));
  key = splitmix64(key ^ (static_cast<std::uint64_t>(sample_index) + 0x51ed2701ull));
  return static_cast<double>(key >> 11) * 0x1.0p-53;
}

}  // namespace

bool MockRule::matches(const std::string& prompt, double temperature,
                       const std::string& model_id) const {
  if (temperature < temp_min || temperature > temp_max) return false;
  if (model && *model != model_id) return false;
  if (question) return *question == prompt;
  if (pattern) return std::regex_search(prompt, compiled);
  return false;
}

MockScript MockScript::from_json(const nlohmann::json& j) {
  MockScript script;
  if (!j.is_object()) throw ConfigError("mock script must be a JSON object");
  script.seed = j.value("seed", 0ull);
  if (!j.contains("rules") || !j.at("rules").is_array()) {
    throw ConfigError("mock script needs a 'rules' array");
  }
  for (const auto& rj : j.at("rules")) {
    MockRule rule;
    if (rj.contains("question")) rule.question = rj.at("question").get<std::string>();
    if (rj.contains("pattern")) rule.pattern = rj.at("pattern").get<std::string>();
    if (rj.contains("model")) rule.model = rj.at("model").get<std::string>();
    rule.temp_min = rj.value("temp_min", 0.0);
    rule.temp_max = rj.value("temp_max", std::numeric_limits<double>::infinity());
    if (rj.contains("error")) rule.error = rj.at("error").get<std::string>();
    if (rj.contains("responses")) {
      for (const auto& resp : rj.at("responses")) {
        rule.responses.emplace_back(resp.at("text").get<std::string>(),
                                    resp.value("p", 1.0));
      }
    }
    if (rule.pattern) {
      try {
        rule.compiled = std::regex(*rule.pattern);
      } catch (const std::regex_error& ex) {
        throw ConfigError("bad mock rule pattern '" + *rule.pattern + "': " + ex.what());
      }
    }
    script.rules.push_back(std::move(rule));
  }
  script.validate();
  return script;
}

MockScript MockScript::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mock script: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError("invalid mock script JSON: " + std::string(ex.what()));
  }
  return from_json(j);
}

nlohmann::json MockScript::to_json() const {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& rule : this->rules) {
    nlohmann::json rj;
    if (rule.question) rj["question"] = *rule.question;
    if (rule.pattern) rj["pattern"] = *rule.pattern;
    if (rule.model) rj["model"] = *rule.model;
    if (rule.temp_min != 0.0) rj["temp_min"] = rule.temp_min;
    if (std::isfinite(rule.temp_max)) rj["temp_max"] = rule.temp_max;
    if (rule.error) rj["error"] = *rule.error;
    nlohmann::json responses = nlohmann::json::array();
    for (const auto& [text, p] : rule.responses) {
      responses.push_back({{"text", text}, {"p", p}});
    }
    rj["responses"] = std::move(responses);
    rules.push_back(std::move(rj));
  }
  return {{"seed", seed}, {"rules", std::move(rules)}};
}

void MockScript::validate() const {
  if (rules.empty()) throw ConfigError("mock script has no rules");
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const MockRule& rule = rules[i];
    const std::string where = "mock rule " + std::to_string(i);
    if (rule.question.has_value() == rule.pattern.has_value()) {
      throw ConfigError(where + ": exactly one of 'question' or 'pattern' required");
    }
    if (rule.error) continue;
    if (rule.responses.empty()) {
      throw ConfigError(where + ": no responses");
    }
    double total = 0.0;
    for (const auto& [text, p] : rule.responses) {
      if (p < 0.0) throw ConfigError(where + ": negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ConfigError(where + ": probabilities sum to " + std::to_string(total));
    }
  }
}

MockBackend::MockBackend(MockScript script) : script_(std::move(script)) {
  script_.validate();
}

std::string MockBackend::complete(const CompletionRequest& request) {
  calls_.fetch_add(1);
  for (const MockRule& rule : script_.rules) {
    if (!rule.matches(request.prompt, request.temperature, request.model)) continue;
    if (rule.error) throw BackendError(*rule.error);
    if (request.temperature <= 0.0) {
      const auto* best = &rule.responses.front();
      for (const auto& candidate : rule.responses) {
        if (candidate.second > best->second) best = &candidate;
      }
      return best->first;
    }
    const double u = keyed_uniform(script_.seed, request.prompt, request.sample_index);
    double cumulative = 0.0;
    for (const auto& [text, p] : rule.responses) {
      cumulative += p;
      if (u < cumulative) return text;
    }
    return rule.responses.back().first;  // guard against rounding at u ~ 1
  }
  throw BackendError("no mock rule matches prompt: " +
                     request.prompt.substr(0, 120));
}

}  // namespace sac3
