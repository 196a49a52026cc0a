#pragma once

#include <optional>
#include <string>

#include "sac3/config.hpp"
#include "sac3/prompts.hpp"
#include "sac3/report.hpp"
#include "sac3/sampler.hpp"
#include "sac3/types.hpp"

namespace sac3 {

// How unparseable checker output enters the scores: conservative counts the
// cell as inequivalent (biases toward flagging), skip excludes it like a
// failed cell.
enum class UnparseablePolicy { conservative, skip };

struct DetectorOptions {
  int max_parallel = 8;
  bool regenerate = false;  // one extra perturbation round if survivors < k
  UnparseablePolicy unparseable = UnparseablePolicy::conservative;
};

// The full pipeline: perturb the question, sample target and verifier,
// check every QA pair against the original one, fold the verdicts into
// scores and a final hallucination decision.
class Detector {
public:
  Detector(DetectorConfig config, BackendSet backends, PromptRegistry prompts,
           DetectorOptions options = {});

  // Scores answer (or, when absent, the target's deterministic answer) for
  // question. A fully failed stage yields absent component scores, never
  // fabricated ones.
  ScoreReport detect(const Question& question,
                     const std::optional<std::string>& answer = std::nullopt);

  const DetectorConfig& config() const { return config_; }

private:
  DetectorConfig config_;
  BackendSet backends_;
  PromptRegistry prompts_;
  DetectorOptions options_;
};

}  // namespace sac3
