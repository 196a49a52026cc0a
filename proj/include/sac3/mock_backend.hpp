#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <regex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sac3/backend.hpp"

namespace sac3 {

// One scripted response rule. A rule applies when its matcher hits the
// request prompt, the temperature falls inside [temp_min, temp_max] and the
// optional model matcher agrees. Rules are tried in order; the first
// applicable one wins.
struct MockRule {
  std::optional<std::string> question;  // exact prompt match
  std::optional<std::string> pattern;   // regex searched in the prompt
  std::optional<std::string> model;     // exact model id match
  double temp_min = 0.0;
  double temp_max = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::string, double>> responses;  // (text, probability)
  std::optional<std::string> error;  // if set, the rule fails the request

  std::regex compiled;  // valid when pattern is set

  bool matches(const std::string& prompt, double temperature,
               const std::string& model_id) const;
};

struct MockScript {
  std::uint64_t seed = 0;
  std::vector<MockRule> rules;

  static MockScript from_json(const nlohmann::json& j);
  static MockScript from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // Probabilities of each distribution must sum to 1 within 1e-9 and the
  // script must contain at least one rule.
  void validate() const;
};

// Deterministic scripted model. At temperature 0 a rule answers with its
// highest-probability text; above 0 it samples the distribution with a
// generator keyed by (seed, prompt, sample_index), so replays and batch
// order cannot change the outcome.
class MockBackend : public Backend {
public:
  explicit MockBackend(MockScript script);

  std::string complete(const CompletionRequest& request) override;
  std::uint64_t calls() const override { return calls_.load(); }

  const MockScript& script() const { return script_; }

private:
  MockScript script_;
  std::atomic<std::uint64_t> calls_{0};
};

}  // namespace sac3
