#include "sac3/report.hpp"

namespace sac3 {

namespace {

using nlohmann::json;

json opt_to_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

std::optional<double> opt_from_json(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json scores_to_json(const ComponentScores& s) {
  return json{
      {"z_sc2", opt_to_json(s.z_sc2)},
      {"z_q", opt_to_json(s.z_q)},
      {"z_m", opt_to_json(s.z_m)},
      {"z_qm", opt_to_json(s.z_qm)},
      {"z_all", opt_to_json(s.z_all)},
      {"z_all_normalized", opt_to_json(s.z_all_normalized)},
  };
}

ComponentScores scores_from_json(const json& j) {
  ComponentScores s;
  s.z_sc2 = opt_from_json(j, "z_sc2");
  s.z_q = opt_from_json(j, "z_q");
  s.z_m = opt_from_json(j, "z_m");
  s.z_qm = opt_from_json(j, "z_qm");
  s.z_all = opt_from_json(j, "z_all");
  s.z_all_normalized = opt_from_json(j, "z_all_normalized");
  return s;
}

json pair_to_json(const PairOutcome& p) {
  json j{{"question", p.question}, {"answer", p.answer}};
  if (p.cell.usable()) {
    j["equivalent"] = p.cell.verdict->equivalent;
    j["confidence"] = p.cell.verdict->confidence;
    j["raw_response"] = p.cell.verdict->raw_response;
  } else {
    j["equivalent"] = nullptr;
  }
  if (!p.cell.error.empty()) j["error"] = p.cell.error;
  return j;
}

PairOutcome pair_from_json(const json& j) {
  PairOutcome p;
  p.question = j.value("question", "");
  p.answer = j.value("answer", "");
  if (j.contains("equivalent") && !j.at("equivalent").is_null()) {
    EquivalenceVerdict v;
    v.equivalent = j.at("equivalent").get<bool>();
    v.confidence = j.value("confidence", 1.0);
    v.raw_response = j.value("raw_response", "");
    p.cell.verdict = std::move(v);
  }
  p.cell.error = j.value("error", "");
  return p;
}

json pair_list_to_json(const std::vector<PairOutcome>& list) {
  json arr = json::array();
  for (const auto& p : list) arr.push_back(pair_to_json(p));
  return arr;
}

std::vector<PairOutcome> pair_list_from_json(const json& arr) {
  std::vector<PairOutcome> out;
  for (const auto& item : arr) out.push_back(pair_from_json(item));
  return out;
}

json pair_matrix_to_json(const std::vector<std::vector<PairOutcome>>& rows) {
  json arr = json::array();
  for (const auto& row : rows) arr.push_back(pair_list_to_json(row));
  return arr;
}

std::vector<std::vector<PairOutcome>> pair_matrix_from_json(const json& arr) {
  std::vector<std::vector<PairOutcome>> out;
  for (const auto& row : arr) out.push_back(pair_list_from_json(row));
  return out;
}

}  // namespace

json ScoreReport::to_json() const {
  json checks{
      {"self", pair_list_to_json(self_checks)},
      {"verifier", pair_list_to_json(verifier_checks)},
      {"cross_q", pair_matrix_to_json(cross_q_checks)},
      {"cross_qm", pair_matrix_to_json(cross_qm_checks)},
  };
  json j{
      {"question_id", question_id},
      {"question", question},
      {"answer", answer},
      {"scores", scores_to_json(scores)},
      {"confidence_weighted", scores_to_json(confidence_weighted)},
      {"verdict", sac3::to_string(verdict)},
      {"threshold_used", threshold_used},
      {"decision_score", decision_score},
      {"decision_basis", decision_basis},
      {"perturbed_questions", perturbed_questions},
      {"checks", checks},
      {"timing_ms", timing_ms},
  };
  if (!stage_errors.empty()) j["stage_errors"] = stage_errors;
  return j;
}

ScoreReport ScoreReport::from_json(const json& j) {
  ScoreReport r;
  r.question_id = j.value("question_id", "");
  r.question = j.value("question", "");
  r.answer = j.value("answer", "");
  r.scores = scores_from_json(j.at("scores"));
  r.confidence_weighted = scores_from_json(j.at("confidence_weighted"));
  r.verdict = j.value("verdict", "factual") == "hallucinated"
                  ? Verdict::hallucinated
                  : Verdict::factual;
  r.threshold_used = j.value("threshold_used", 0.5);
  r.decision_score = j.value("decision_score", 0.0);
  r.decision_basis = j.value("decision_basis", "");
  if (j.contains("perturbed_questions")) {
    r.perturbed_questions = j.at("perturbed_questions").get<std::vector<std::string>>();
  }
  const json& checks = j.at("checks");
  r.self_checks = pair_list_from_json(checks.at("self"));
  r.verifier_checks = pair_list_from_json(checks.at("verifier"));
  r.cross_q_checks = pair_matrix_from_json(checks.at("cross_q"));
  r.cross_qm_checks = pair_matrix_from_json(checks.at("cross_qm"));
  if (j.contains("timing_ms")) {
    r.timing_ms = j.at("timing_ms").get<std::map<std::string, double>>();
  }
  if (j.contains("stage_errors")) {
    r.stage_errors = j.at("stage_errors").get<std::map<std::string, std::string>>();
  }
  return r;
}

}  // namespace sac3
