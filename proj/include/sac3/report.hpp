#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sac3/types.hpp"

namespace sac3 {

// One component score per consistency branch. Absent means the branch was
// not configured (sample count 0) or every cell of it failed.
struct ComponentScores {
  std::optional<double> z_sc2;
  std::optional<double> z_q;
  std::optional<double> z_m;
  std::optional<double> z_qm;
  std::optional<double> z_all;             // z_q + lambda * (z_m + z_qm), present terms only
  std::optional<double> z_all_normalized;  // z_all over the weight mass of present terms
};

// One checked QA pair with its outcome, kept for audit and offline sweeps.
struct PairOutcome {
  std::string question;  // question of the compared pair
  std::string answer;    // answer of the compared pair
  VerdictCell cell;
};

struct ScoreReport {
  std::string question_id;
  std::string question;
  std::string answer;

  ComponentScores scores;
  ComponentScores confidence_weighted;

  Verdict verdict = Verdict::factual;
  double threshold_used = 0.5;
  double decision_score = 0.0;
  std::string decision_basis;  // "z_all_normalized", "z_all" or "z_sc2"

  std::vector<std::string> perturbed_questions;
  std::vector<PairOutcome> self_checks;                   // n_s
  std::vector<PairOutcome> verifier_checks;               // n_m
  std::vector<std::vector<PairOutcome>> cross_q_checks;   // k x n_q
  std::vector<std::vector<PairOutcome>> cross_qm_checks;  // k x n_qm

  std::map<std::string, double> timing_ms;
  std::map<std::string, std::string> stage_errors;

  nlohmann::json to_json() const;
  static ScoreReport from_json(const nlohmann::json& j);
};

}  // namespace sac3
