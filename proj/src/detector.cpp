#include "sac3/detector.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <set>

#include "sac3/checker.hpp"
#include "sac3/perturb.hpp"
#include "sac3/scoring.hpp"

namespace sac3 {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Applies the unparseable-output policy: conservative turns an unreadable
// judge answer into an inequivalent verdict (confidence 1 keeps the
// confidence-weighted scores aligned with the unweighted ones).
void apply_policy(std::vector<VerdictCell>& cells, UnparseablePolicy policy) {
  if (policy != UnparseablePolicy::conservative) return;
  for (VerdictCell& cell : cells) {
    if (cell.parse_failed && !cell.usable()) {
      cell.verdict = EquivalenceVerdict{false, 1.0, cell.raw};
    }
  }
}

std::optional<double> try_score(const std::function<double()>& fn) {
  try {
    return fn();
  } catch (const ScoringError&) {
    return std::nullopt;
  }
}

VerdictMatrix to_matrix(const std::vector<std::vector<VerdictCell>>& rows) {
  VerdictMatrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows.front().size();
  for (const auto& row : rows) {
    m.cells.insert(m.cells.end(), row.begin(), row.end());
  }
  return m;
}

std::vector<PairOutcome> to_outcomes(const Question& q,
                                     const std::vector<SampleCell>& samples,
                                     const std::vector<VerdictCell>& cells) {
  std::vector<PairOutcome> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    PairOutcome o;
    o.question = q.text;
    o.answer = samples[i].ok() ? samples[i].answer->text : "";
    o.cell = cells[i];
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace

Detector::Detector(DetectorConfig config, BackendSet backends,
                   PromptRegistry prompts, DetectorOptions options)
    : config_(validate_config(config)),
      backends_(std::move(backends)),
      prompts_(std::move(prompts)),
      options_(options) {
  if (!backends_.target) throw ConfigError("target backend is required");
  if (!backends_.verifier) backends_.verifier = backends_.target;
  if (!backends_.checker) backends_.checker = backends_.target;
}

ScoreReport Detector::detect(const Question& question,
                             const std::optional<std::string>& answer) {
  const auto t_total = Clock::now();
  ScoreReport report;
  report.question_id = question.id;
  report.question = question.text;
  report.threshold_used = config_.threshold;

  // Original answer: supplied by the caller, or the target's deterministic
  // response.
  Answer s0;
  if (answer.has_value()) {
    s0 = Answer{trim(*answer), "external", config_.temp_deterministic, 0};
  } else {
    CompletionRequest request;
    request.model = config_.target_model;
    request.prompt = question.text;
    request.temperature = config_.temp_deterministic;
    request.max_tokens = config_.max_tokens;
    try {
      s0 = Answer{trim(backends_.target->complete(request)), config_.target_model,
                  config_.temp_deterministic, 0};
    } catch (const std::exception& ex) {
      throw BackendError(std::string("original answer stage failed: ") + ex.what());
    }
  }
  if (s0.text.empty()) throw ConfigError("original answer is empty");
  report.answer = s0.text;

  PerturbOptions perturb_options;
  perturb_options.model = config_.checker_or_target();
  perturb_options.temperature = config_.temp_deterministic;
  perturb_options.max_parallel = options_.max_parallel;

  // Stage 1: semantically equivalent question perturbation + filtering.
  const auto t_perturb = Clock::now();
  std::vector<Question> perturbed;
  if (config_.k > 0) {
    auto one_round = [&](int sample_index) -> std::vector<Question> {
      PerturbOptions round = perturb_options;
      round.sample_index = sample_index;
      auto candidates =
          generate_perturbations(question, config_.k, *backends_.checker, prompts_, round);
      return filter_equivalent(question, candidates, *backends_.checker, prompts_, round);
    };
    try {
      perturbed = one_round(0);
    } catch (const Error& ex) {
      report.stage_errors["perturb"] = ex.what();
      std::cerr << "[sac3] perturbation stage failed: " << ex.what() << "\n";
    }
    if (options_.regenerate && static_cast<int>(perturbed.size()) < config_.k) {
      try {
        std::set<std::string> seen{normalize_text(question.text)};
        for (const Question& q : perturbed) seen.insert(normalize_text(q.text));
        for (Question& q : one_round(1)) {
          if (static_cast<int>(perturbed.size()) >= config_.k) break;
          if (seen.insert(normalize_text(q.text)).second) {
            perturbed.push_back(std::move(q));
          }
        }
      } catch (const Error& ex) {
        report.stage_errors["perturb_regenerate"] = ex.what();
      }
    }
    for (std::size_t i = 0; i < perturbed.size(); ++i) {
      perturbed[i].id = "x" + std::to_string(i + 1);
    }
  }
  report.timing_ms["perturb"] = ms_since(t_perturb);
  for (const Question& q : perturbed) report.perturbed_questions.push_back(q.text);

  // Stage 2: sample sets from target and verifier.
  const auto t_sample = Clock::now();
  const SampleSet samples =
      build_sample_set(config_, question, perturbed, backends_, options_.max_parallel);
  report.timing_ms["sample"] = ms_since(t_sample);

  // Stage 3: semantic consistency checks of every QA pair against the
  // original pair, issued as one bounded-parallel batch.
  const auto t_check = Clock::now();
  const QAPair p0{question, s0};
  CheckerOptions checker_options;
  checker_options.model = config_.checker_or_target();
  checker_options.temperature = config_.temp_deterministic;
  checker_options.max_parallel = options_.max_parallel;

  struct BranchRef {
    std::vector<VerdictCell>* cells;
    std::size_t index;
  };
  std::vector<QAPair> pairs;
  std::vector<BranchRef> refs;

  std::vector<VerdictCell> self_cells(samples.self_target.size());
  std::vector<VerdictCell> verifier_cells(samples.self_verifier.size());
  std::vector<std::vector<VerdictCell>> q_cells(samples.cross_target.size());
  std::vector<std::vector<VerdictCell>> qm_cells(samples.cross_verifier.size());

  auto enqueue = [&](const Question& q, const std::vector<SampleCell>& row,
                     std::vector<VerdictCell>& cells) {
    cells.resize(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i].ok()) {
        cells[i].error = "sample failed: " + row[i].error;
        continue;
      }
      pairs.push_back(QAPair{q, *row[i].answer});
      refs.push_back({&cells, i});
    }
  };

  enqueue(question, samples.self_target, self_cells);
  enqueue(question, samples.self_verifier, verifier_cells);
  for (std::size_t row = 0; row < samples.cross_target.size(); ++row) {
    enqueue(samples.perturbed_questions[row], samples.cross_target[row], q_cells[row]);
  }
  for (std::size_t row = 0; row < samples.cross_verifier.size(); ++row) {
    enqueue(samples.perturbed_questions[row], samples.cross_verifier[row], qm_cells[row]);
  }

  const auto verdicts =
      check_pair_batch(p0, pairs, *backends_.checker, prompts_, checker_options);
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    (*refs[i].cells)[refs[i].index] = verdicts[i];
  }

  apply_policy(self_cells, options_.unparseable);
  apply_policy(verifier_cells, options_.unparseable);
  for (auto& row : q_cells) apply_policy(row, options_.unparseable);
  for (auto& row : qm_cells) apply_policy(row, options_.unparseable);
  report.timing_ms["check"] = ms_since(t_check);

  // Scores over usable cells only.
  const VerdictMatrix q_matrix = to_matrix(q_cells);
  const VerdictMatrix qm_matrix = to_matrix(qm_cells);

  ComponentScores& s = report.scores;
  if (!samples.self_target.empty()) {
    s.z_sc2 = try_score([&] { return score_sc2(self_cells); });
  }
  if (!samples.self_verifier.empty()) {
    s.z_m = try_score([&] { return score_m(verifier_cells); });
  }
  if (!q_matrix.cells.empty()) {
    s.z_q = try_score([&] { return score_q(q_matrix); });
  }
  if (!qm_matrix.cells.empty()) {
    s.z_qm = try_score([&] { return score_qm(qm_matrix); });
  }
  if (s.z_q || s.z_m || s.z_qm) {
    const CombinedScore combined =
        score_all(s.z_q, s.z_m, s.z_qm, config_.lambda_weight);
    s.z_all = combined.raw;
    s.z_all_normalized = combined.normalized;
  }

  ComponentScores& cw = report.confidence_weighted;
  if (!samples.self_target.empty()) {
    cw.z_sc2 = try_score([&] { return confidence_weighted_score(self_cells); });
  }
  if (!samples.self_verifier.empty()) {
    cw.z_m = try_score([&] { return confidence_weighted_score(verifier_cells); });
  }
  if (!q_matrix.cells.empty()) {
    cw.z_q = try_score([&] { return confidence_weighted_score(q_matrix); });
  }
  if (!qm_matrix.cells.empty()) {
    cw.z_qm = try_score([&] { return confidence_weighted_score(qm_matrix); });
  }
  if (cw.z_q || cw.z_m || cw.z_qm) {
    const CombinedScore combined =
        score_all(cw.z_q, cw.z_m, cw.z_qm, config_.lambda_weight);
    cw.z_all = combined.raw;
    cw.z_all_normalized = combined.normalized;
  }

  // Verdict from the combined score when any cross/verifier branch exists,
  // else from self-consistency alone.
  if (s.z_all) {
    if (config_.normalize_all) {
      report.decision_score = *s.z_all_normalized;
      report.decision_basis = "z_all_normalized";
    } else {
      report.decision_score = *s.z_all;
      report.decision_basis = "z_all";
    }
  } else if (s.z_sc2) {
    report.decision_score = *s.z_sc2;
    report.decision_basis = "z_sc2";
  } else {
    throw ScoringError("every consistency branch failed; no score available");
  }
  report.verdict = decide(report.decision_score, config_.threshold);

  report.self_checks = to_outcomes(question, samples.self_target, self_cells);
  report.verifier_checks = to_outcomes(question, samples.self_verifier, verifier_cells);
  for (std::size_t row = 0; row < q_cells.size(); ++row) {
    report.cross_q_checks.push_back(
        to_outcomes(samples.perturbed_questions[row], samples.cross_target[row], q_cells[row]));
  }
  for (std::size_t row = 0; row < qm_cells.size(); ++row) {
    report.cross_qm_checks.push_back(to_outcomes(samples.perturbed_questions[row],
                                                 samples.cross_verifier[row], qm_cells[row]));
  }

  report.timing_ms["total"] = ms_since(t_total);
  return report;
}

}  // namespace sac3
