#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "sac3/datasets.hpp"
#include "sac3/detector.hpp"
#include "sac3/eval.hpp"

namespace sac3 {

struct EvalOptions {
  std::filesystem::path out_dir;
  bool resume = false;
  DetectorOptions detector;
};

struct EvalOutcome {
  std::size_t n = 0;
  std::size_t n_run = 0;  // examples executed in this invocation
  nlohmann::json summary;
};

// Runs the detector over every example, appending one line per example to
// <out_dir>/reports.jsonl and writing aggregate metrics to
// <out_dir>/summary.json. With resume, examples already present in the
// report log are not re-run (and issue no backend calls).
EvalOutcome run_eval(const std::vector<LabeledExample>& dataset,
                     const DetectorConfig& config, const BackendSet& backends,
                     const PromptRegistry& prompts, const EvalOptions& options);

// One persisted per-example record, as needed by offline sweeps.
struct RunRecord {
  int index = 0;
  int label = 0;
  ScoreReport report;

  // Usable cell scores per perturbed-question row.
  VerdictRows q_rows() const;
  VerdictRows qm_rows() const;
};

std::vector<RunRecord> load_run(const std::filesystem::path& out_dir);

// Aggregate AUROC / accuracy metrics over a finished run.
nlohmann::json summarize_run(const std::vector<RunRecord>& records,
                             double threshold);

}  // namespace sac3
