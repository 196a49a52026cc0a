#include "sac3/eval_runner.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>

#include "sac3/checker.hpp"

namespace sac3 {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

VerdictRows rows_from_checks(const std::vector<std::vector<PairOutcome>>& checks) {
  VerdictRows rows;
  rows.reserve(checks.size());
  for (const auto& row : checks) {
    std::vector<double> values;
    for (const PairOutcome& outcome : row) {
      if (outcome.cell.usable()) {
        values.push_back(verdict_to_score(*outcome.cell.verdict));
      }
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

void add_metric(json& bucket, const std::string& name,
                const std::vector<double>& scores, const std::vector<int>& labels,
                double threshold, json& accuracy_bucket) {
  if (scores.empty()) return;
  accuracy_bucket[name] = accuracy_at_threshold(scores, labels, threshold);
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
  if (has_pos && has_neg) {
    bucket[name] = auroc(scores, labels);
  }
}

void collect(const std::vector<RunRecord>& records,
             const std::function<std::optional<double>(const RunRecord&)>& pick,
             std::vector<double>& scores, std::vector<int>& labels) {
  scores.clear();
  labels.clear();
  for (const RunRecord& r : records) {
    if (auto v = pick(r)) {
      scores.push_back(*v);
      labels.push_back(r.label);
    }
  }
}

}  // namespace

VerdictRows RunRecord::q_rows() const { return rows_from_checks(report.cross_q_checks); }
VerdictRows RunRecord::qm_rows() const { return rows_from_checks(report.cross_qm_checks); }

EvalOutcome run_eval(const std::vector<LabeledExample>& dataset,
                     const DetectorConfig& config, const BackendSet& backends,
                     const PromptRegistry& prompts, const EvalOptions& options) {
  if (options.out_dir.empty()) throw ConfigError("eval needs an output directory");
  fs::create_directories(options.out_dir);
  const fs::path reports_path = options.out_dir / "reports.jsonl";

  std::map<int, bool> done;
  if (options.resume && fs::exists(reports_path)) {
    std::ifstream in(reports_path);
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      try {
        done[json::parse(line).at("index").get<int>()] = true;
      } catch (const json::exception&) {
        // ignore damaged lines; the example will be re-run
      }
    }
  } else if (fs::exists(reports_path)) {
    fs::remove(reports_path);
  }

  EvalOutcome outcome;
  outcome.n = dataset.size();

  Detector detector(config, backends, prompts, options.detector);
  std::ofstream out(reports_path, std::ios::app);
  if (!out) throw Error("cannot write " + reports_path.string());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int index = static_cast<int>(i);
    if (done.count(index)) continue;
    const LabeledExample& ex = dataset[i];
    const Question question = make_question(ex.question, "q" + std::to_string(index));
    ScoreReport report = detector.detect(question, ex.answer);
    json line{{"index", index}, {"label", ex.label}, {"report", report.to_json()}};
    out << line.dump() << "\n";
    out.flush();
    ++outcome.n_run;
  }
  out.close();

  const auto records = load_run(options.out_dir);
  outcome.summary = summarize_run(records, config.threshold);
  outcome.summary["config"] = config_to_json(config);
  std::ofstream summary_out(options.out_dir / "summary.json");
  summary_out << outcome.summary.dump(2) << "\n";
  return outcome;
}

std::vector<RunRecord> load_run(const fs::path& out_dir) {
  const fs::path reports_path = out_dir / "reports.jsonl";
  std::ifstream in(reports_path);
  if (!in) throw Error("cannot open " + reports_path.string());

  std::vector<RunRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      RunRecord record;
      record.index = j.at("index").get<int>();
      record.label = j.at("label").get<int>();
      record.report = ScoreReport::from_json(j.at("report"));
      records.push_back(std::move(record));
    } catch (const json::exception& ex) {
      throw Error("reports.jsonl line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.index < b.index; });
  return records;
}

json summarize_run(const std::vector<RunRecord>& records, double threshold) {
  json auroc_bucket = json::object();
  json auroc_cw_bucket = json::object();
  json accuracy_bucket = json::object();
  json accuracy_cw_bucket = json::object();

  std::vector<double> scores;
  std::vector<int> labels;

  struct Column {
    const char* name;
    std::function<std::optional<double>(const ComponentScores&)> pick;
  };
  const std::vector<Column> columns = {
      {"z_sc2", [](const ComponentScores& s) { return s.z_sc2; }},
      {"z_q", [](const ComponentScores& s) { return s.z_q; }},
      {"z_m", [](const ComponentScores& s) { return s.z_m; }},
      {"z_qm", [](const ComponentScores& s) { return s.z_qm; }},
      {"z_all", [](const ComponentScores& s) { return s.z_all; }},
      {"z_all_normalized", [](const ComponentScores& s) { return s.z_all_normalized; }},
  };

  for (const Column& column : columns) {
    collect(records,
            [&](const RunRecord& r) { return column.pick(r.report.scores); },
            scores, labels);
    add_metric(auroc_bucket, column.name, scores, labels, threshold, accuracy_bucket);
    collect(records,
            [&](const RunRecord& r) { return column.pick(r.report.confidence_weighted); },
            scores, labels);
    add_metric(auroc_cw_bucket, column.name, scores, labels, threshold,
               accuracy_cw_bucket);
  }

  collect(records, [](const RunRecord& r) { return std::optional<double>(r.report.decision_score); },
          scores, labels);
  add_metric(auroc_bucket, "decision", scores, labels, threshold, accuracy_bucket);

  std::size_t hallucinated = 0;
  for (const RunRecord& r : records) hallucinated += static_cast<std::size_t>(r.label == 1);

  return json{
      {"n", records.size()},
      {"n_hallucinated", hallucinated},
      {"threshold", threshold},
      {"auroc", auroc_bucket},
      {"auroc_confidence_weighted", auroc_cw_bucket},
      {"accuracy_at_threshold", accuracy_bucket},
      {"accuracy_at_threshold_confidence_weighted", accuracy_cw_bucket},
  };
}

}  // namespace sac3
