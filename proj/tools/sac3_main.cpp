// Command-line front end: detect / eval / synth / sweep / cache.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "sac3/cache.hpp"
#include "sac3/config.hpp"
#include "sac3/datasets.hpp"
#include "sac3/detector.hpp"
#include "sac3/eval.hpp"
#include "sac3/eval_runner.hpp"
#include "sac3/http_backend.hpp"
#include "sac3/mock_backend.hpp"

namespace {

using nlohmann::json;

struct GlobalOptions {
  std::string config_path;
  std::string backend = "openai-compatible";
  std::string base_url;
  std::string target_model;
  std::string verifier_model;
  std::string checker_model;
  std::string script_path;
  std::string prompts_path;
  std::string cache_dir;
  std::string out;
  int max_parallel = 8;
  std::int64_t seed = 0;
  bool seed_given = false;
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value ? std::string(value) : fallback;
}

sac3::DetectorConfig resolve_config(const GlobalOptions& global) {
  sac3::DetectorConfig config;
  if (!global.config_path.empty()) {
    config = sac3::load_config(global.config_path);
  }
  if (!global.target_model.empty()) config.target_model = global.target_model;
  if (!global.verifier_model.empty()) config.verifier_model = global.verifier_model;
  if (!global.checker_model.empty()) config.checker_model = global.checker_model;
  if (global.seed_given) config.seed = global.seed;
  return config;
}

std::shared_ptr<sac3::Backend> build_backend(const GlobalOptions& global,
                                             const sac3::DetectorConfig& config) {
  std::shared_ptr<sac3::Backend> backend;
  if (global.backend == "mock") {
    if (global.script_path.empty()) {
      throw sac3::ConfigError("mock backend needs --script");
    }
    sac3::MockScript script = sac3::MockScript::from_file(global.script_path);
    if (global.seed_given) script.seed = static_cast<std::uint64_t>(config.seed);
    backend = std::make_shared<sac3::MockBackend>(std::move(script));
  } else {
    sac3::HttpBackendOptions options;
    options.base_url = global.base_url.empty()
                           ? env_or("SAC3_BASE_URL", "https://api.openai.com/v1")
                           : global.base_url;
    options.api_key = env_or("SAC3_API_KEY", "");
    backend = std::make_shared<sac3::HttpBackend>(options);
  }
  if (!global.cache_dir.empty()) {
    backend = std::make_shared<sac3::CachedBackend>(backend, global.cache_dir);
  }
  return backend;
}

sac3::PromptRegistry resolve_prompts(const GlobalOptions& global) {
  return global.prompts_path.empty()
             ? sac3::PromptRegistry::defaults()
             : sac3::PromptRegistry::from_file(global.prompts_path);
}

std::vector<double> parse_csv_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (sac3::trim(item).empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::vector<int> parse_csv_ints(const std::string& csv) {
  std::vector<int> out;
  for (double v : parse_csv_doubles(csv)) out.push_back(static_cast<int>(v));
  return out;
}

std::optional<double> score_by_name(const sac3::RunRecord& record,
                                    const std::string& name) {
  const sac3::ComponentScores& s = record.report.scores;
  if (name == "decision") return record.report.decision_score;
  if (name == "z_sc2") return s.z_sc2;
  if (name == "z_q") return s.z_q;
  if (name == "z_m") return s.z_m;
  if (name == "z_qm") return s.z_qm;
  if (name == "z_all") return s.z_all;
  if (name == "z_all_normalized") return s.z_all_normalized;
  throw sac3::ConfigError("unknown score column: " + name);
}

void write_table(const json& rows, const std::vector<std::string>& columns,
                 const std::string& out_path, const std::string& format) {
  std::ostringstream body;
  if (format == "csv") {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      body << (i ? "," : "") << columns[i];
    }
    body << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < columns.size(); ++i) {
        body << (i ? "," : "") << row.at(columns[i]).dump();
      }
      body << "\n";
    }
  } else {
    for (const auto& row : rows) body << row.dump() << "\n";
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << body.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw sac3::Error("cannot write " + out_path);
    out << body.str();
    std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
  }
}

void emit_dataset(const std::vector<sac3::LabeledExample>& examples,
                  const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << sac3::dataset_to_jsonl(examples);
  } else {
    sac3::save_dataset(examples, out_path);
    std::cout << "wrote " << examples.size() << " examples to " << out_path << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic-aware cross-check consistency hallucination detector"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--config", global.config_path, "JSON config file");
  app.add_option("--backend", global.backend, "LM backend")
      ->check(CLI::IsMember({"openai-compatible", "mock"}));
  app.add_option("--base-url", global.base_url,
                 "chat-completions base URL (default $SAC3_BASE_URL)");
  app.add_option("--target-model", global.target_model, "target model id");
  app.add_option("--verifier-model", global.verifier_model, "verifier model id");
  app.add_option("--checker-model", global.checker_model,
                 "judge model id (default: target model)");
  app.add_option("--script", global.script_path, "mock script JSON file");
  app.add_option("--prompts", global.prompts_path, "prompt registry JSON file");
  app.add_option("--cache-dir", global.cache_dir, "enable the on-disk response cache");
  app.add_option("--max-parallel", global.max_parallel, "parallel request bound")
      ->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", global.seed, "seed override");
  app.add_option("--out", global.out, "output file or directory");

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "score one question/answer pair");
  std::string question_text;
  std::string answer_text;
  detect_cmd->add_option("--question", question_text, "the question to assess")->required();
  auto* answer_opt = detect_cmd->add_option(
      "--answer", answer_text, "answer to score (default: ask the target)");
  int k_override = -1, ns_override = -1, nm_override = -1, nq_override = -1,
      nqm_override = -1;
  double lambda_override = -1.0, threshold_override = -1.0;
  bool no_normalize = false;
  bool regenerate = false;
  bool skip_unparseable = false;
  detect_cmd->add_option("--k", k_override, "perturbed question count");
  detect_cmd->add_option("--n-s", ns_override, "target self-sample count");
  detect_cmd->add_option("--n-m", nm_override, "verifier sample count");
  detect_cmd->add_option("--n-q", nq_override, "target samples per perturbation");
  detect_cmd->add_option("--n-qm", nqm_override, "verifier samples per perturbation");
  detect_cmd->add_option("--lambda", lambda_override, "verifier weight");
  detect_cmd->add_option("--threshold", threshold_override, "decision threshold");
  detect_cmd->add_flag("--raw-score", no_normalize,
                       "threshold the raw combined score instead of the normalized one");
  detect_cmd->add_flag("--regenerate", regenerate,
                       "retry perturbation once if fewer than k survive filtering");
  detect_cmd->add_flag("--skip-unparseable", skip_unparseable,
                       "drop unreadable judge verdicts instead of counting them inequivalent");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "run detection over a labeled dataset");
  std::string dataset_path;
  bool resume = false;
  eval_cmd->add_option("--dataset", dataset_path, "JSONL dataset")->required();
  eval_cmd->add_flag("--resume", resume, "skip examples already in the output directory");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a benchmark dataset");
  synth_cmd->require_subcommand(1);
  int synth_n = 500;
  std::uint64_t synth_seed = 0;
  std::string synth_mix = "balanced";
  auto* prime_cmd = synth_cmd->add_subcommand("prime", "primality questions");
  std::uint64_t prime_lo = 1000, prime_hi = 20000;
  prime_cmd->add_option("--n", synth_n, "example count");
  prime_cmd->add_option("--lo", prime_lo, "lower bound");
  prime_cmd->add_option("--hi", prime_hi, "upper bound");
  prime_cmd->add_option("--seed", synth_seed, "dataset seed");
  prime_cmd->add_option("--mix", synth_mix, "label mix")
      ->check(CLI::IsMember({"balanced", "hallucinated", "factual"}));
  auto* senator_cmd = synth_cmd->add_subcommand("senator", "senator-search questions");
  std::string states_path, colleges_path;
  senator_cmd->add_option("--n", synth_n, "example count");
  senator_cmd->add_option("--seed", synth_seed, "dataset seed");
  senator_cmd->add_option("--mix", synth_mix, "label mix")
      ->check(CLI::IsMember({"balanced", "hallucinated", "factual"}));
  senator_cmd->add_option("--states", states_path, "state list file (one per line)");
  senator_cmd->add_option("--colleges", colleges_path, "college list file (one per line)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "recompute tables from a finished eval run");
  sweep_cmd->require_subcommand(1);
  std::string run_dir;
  std::string table_format = "jsonl";
  auto* threshold_sweep_cmd = sweep_cmd->add_subcommand("threshold", "accuracy per threshold");
  std::string sweep_score = "decision";
  std::string grid_csv;
  int grid_points = 21;
  threshold_sweep_cmd->add_option("--run", run_dir, "eval output directory")->required();
  threshold_sweep_cmd->add_option("--score", sweep_score, "score column");
  threshold_sweep_cmd->add_option("--grid", grid_csv, "explicit thresholds, comma separated");
  threshold_sweep_cmd->add_option("--grid-points", grid_points, "points over [0, 1]");
  threshold_sweep_cmd->add_option("--format", table_format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  auto* lambda_sweep_cmd = sweep_cmd->add_subcommand("lambda", "AUROC per verifier weight");
  std::string lambdas_csv = "0,0.25,0.5,0.75,1,1.25,1.5,1.75,2";
  lambda_sweep_cmd->add_option("--run", run_dir, "eval output directory")->required();
  lambda_sweep_cmd->add_option("--lambdas", lambdas_csv, "weights, comma separated");
  lambda_sweep_cmd->add_option("--format", table_format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  auto* k_sweep_cmd = sweep_cmd->add_subcommand("k", "AUROC per perturbation-count prefix");
  std::string ks_csv;
  std::string k_matrix = "q";
  k_sweep_cmd->add_option("--run", run_dir, "eval output directory")->required();
  k_sweep_cmd->add_option("--ks", ks_csv, "prefix sizes, comma separated (default: all)");
  k_sweep_cmd->add_option("--matrix", k_matrix, "which cross matrix to use")
      ->check(CLI::IsMember({"q", "qm"}));
  k_sweep_cmd->add_option("--format", table_format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));

  // cache
  auto* cache_cmd = app.add_subcommand("cache", "inspect or clear the response cache");
  cache_cmd->require_subcommand(1);
  auto* cache_stats_cmd = cache_cmd->add_subcommand("stats", "entry count for a cache directory");
  auto* cache_clear_cmd = cache_cmd->add_subcommand("clear", "delete all cache entries");

  CLI11_PARSE(app, argc, argv);
  global.seed_given = seed_opt->count() > 0;
  const bool answer_given = answer_opt->count() > 0;

  try {
    if (*detect_cmd) {
      sac3::DetectorConfig config = resolve_config(global);
      if (k_override >= 0) config.k = k_override;
      if (ns_override >= 0) config.n_s = ns_override;
      if (nm_override >= 0) config.n_m = nm_override;
      if (nq_override >= 0) config.n_q = nq_override;
      if (nqm_override >= 0) config.n_qm = nqm_override;
      if (lambda_override >= 0.0) config.lambda_weight = lambda_override;
      if (threshold_override >= 0.0) config.threshold = threshold_override;
      if (no_normalize) config.normalize_all = false;

      auto backend = build_backend(global, config);
      sac3::BackendSet backends{backend, backend, backend};
      sac3::DetectorOptions options;
      options.max_parallel = global.max_parallel;
      options.regenerate = regenerate;
      options.unparseable = skip_unparseable ? sac3::UnparseablePolicy::skip
                                             : sac3::UnparseablePolicy::conservative;
      sac3::Detector detector(config, backends, resolve_prompts(global), options);

      const sac3::Question question = sac3::make_question(question_text);
      const auto answer = answer_given ? std::optional<std::string>(answer_text)
                                       : std::nullopt;
      const sac3::ScoreReport report = detector.detect(question, answer);
      const json j = report.to_json();
      std::cout << j.dump(2) << "\n";
      if (!global.out.empty()) {
        std::ofstream out(global.out);
        if (!out) throw sac3::Error("cannot write " + global.out);
        out << j.dump(2) << "\n";
      }
      return 0;
    }

    if (*eval_cmd) {
      if (global.out.empty()) throw sac3::ConfigError("eval needs --out <directory>");
      sac3::DetectorConfig config = resolve_config(global);
      auto backend = build_backend(global, config);
      sac3::BackendSet backends{backend, backend, backend};
      sac3::EvalOptions options;
      options.out_dir = global.out;
      options.resume = resume;
      options.detector.max_parallel = global.max_parallel;

      const auto dataset = sac3::load_annotated(dataset_path);
      const auto outcome =
          sac3::run_eval(dataset, config, backends, resolve_prompts(global), options);
      std::cout << outcome.summary.dump(2) << "\n";
      std::cerr << "ran " << outcome.n_run << "/" << outcome.n << " examples; reports in "
                << global.out << "\n";
      return 0;
    }

    if (*prime_cmd) {
      const auto mix = sac3::label_mix_from_string(synth_mix);
      emit_dataset(sac3::synth_prime(synth_n, prime_lo, prime_hi, synth_seed, mix),
                   global.out);
      return 0;
    }
    if (*senator_cmd) {
      const auto mix = sac3::label_mix_from_string(synth_mix);
      const auto states = states_path.empty() ? sac3::default_states()
                                              : sac3::load_name_list(states_path);
      const auto colleges = colleges_path.empty() ? sac3::default_colleges()
                                                  : sac3::load_name_list(colleges_path);
      emit_dataset(sac3::synth_senator(synth_n, synth_seed, mix, states, colleges),
                   global.out);
      return 0;
    }

    if (*threshold_sweep_cmd || *lambda_sweep_cmd || *k_sweep_cmd) {
      const auto records = sac3::load_run(run_dir);
      std::vector<int> labels;
      labels.reserve(records.size());
      for (const auto& r : records) labels.push_back(r.label);

      json rows = json::array();
      std::vector<std::string> columns;
      if (*threshold_sweep_cmd) {
        std::vector<double> grid;
        if (!grid_csv.empty()) {
          grid = parse_csv_doubles(grid_csv);
        } else {
          for (int i = 0; i < grid_points; ++i) {
            grid.push_back(grid_points == 1 ? 0.0
                                            : static_cast<double>(i) / (grid_points - 1));
          }
        }
        std::vector<double> scores;
        std::vector<int> kept;
        for (std::size_t i = 0; i < records.size(); ++i) {
          if (auto v = score_by_name(records[i], sweep_score)) {
            scores.push_back(*v);
            kept.push_back(labels[i]);
          }
        }
        for (const auto& row : sac3::threshold_sweep(scores, kept, grid)) {
          rows.push_back({{"threshold", row.threshold}, {"accuracy", row.accuracy}});
        }
        columns = {"threshold", "accuracy"};
      } else if (*lambda_sweep_cmd) {
        std::vector<sac3::ComponentTriple> triples;
        triples.reserve(records.size());
        for (const auto& r : records) {
          triples.push_back(
              {r.report.scores.z_q, r.report.scores.z_m, r.report.scores.z_qm});
        }
        for (const auto& row :
             sac3::lambda_sweep(triples, labels, parse_csv_doubles(lambdas_csv))) {
          rows.push_back({{"lambda", row.lambda}, {"auroc", row.auroc}});
        }
        columns = {"lambda", "auroc"};
      } else {
        std::vector<sac3::VerdictRows> examples;
        examples.reserve(records.size());
        std::size_t max_rows = 0;
        for (const auto& r : records) {
          examples.push_back(k_matrix == "qm" ? r.qm_rows() : r.q_rows());
          max_rows = std::max(max_rows, examples.back().size());
        }
        std::vector<int> ks;
        if (!ks_csv.empty()) {
          ks = parse_csv_ints(ks_csv);
        } else {
          for (std::size_t k = 1; k <= max_rows; ++k) ks.push_back(static_cast<int>(k));
        }
        for (const auto& row : sac3::k_sweep(examples, labels, ks)) {
          rows.push_back(
              {{"k", row.k}, {"auroc", row.auroc}, {"mean_score", row.mean_score}});
        }
        columns = {"k", "auroc", "mean_score"};
      }
      write_table(rows, columns, global.out, table_format);
      return 0;
    }

    if (*cache_stats_cmd || *cache_clear_cmd) {
      if (global.cache_dir.empty()) {
        throw sac3::ConfigError("cache commands need --cache-dir");
      }
      sac3::DiskCache cache(global.cache_dir);
      if (*cache_clear_cmd) {
        cache.clear();
        std::cout << "cache cleared\n";
        return 0;
      }
      const auto stats = cache.stats();
      std::cout << json{{"hits", stats.hits},
                        {"misses", stats.misses},
                        {"entries", stats.entries}}
                       .dump(2)
                << "\n";
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
