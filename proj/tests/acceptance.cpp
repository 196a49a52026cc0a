// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code is the failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sac3/cache.hpp"
#include "sac3/checker.hpp"
#include "sac3/config.hpp"
#include "sac3/datasets.hpp"
#include "sac3/detector.hpp"
#include "sac3/eval.hpp"
#include "sac3/eval_runner.hpp"
#include "sac3/http_backend.hpp"
#include "sac3/mock_backend.hpp"
#include "sac3/scoring.hpp"

#include "mock_world.hpp"

using namespace sac3;

namespace {

namespace fs = std::filesystem;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Skip : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

void require_close(double actual, double expected, double tolerance,
                   const std::string& what) {
  if (!(std::abs(actual - expected) <= tolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": got " << actual << ", want " << expected << " +/- " << tolerance;
    throw Failure(msg.str());
  }
}

VerdictCell cell(bool equivalent, double confidence = 1.0) {
  VerdictCell c;
  c.verdict = EquivalenceVerdict{equivalent, confidence, ""};
  return c;
}

VerdictMatrix matrix_from_mask(std::size_t rows, std::size_t cols, unsigned mask) {
  VerdictMatrix m;
  m.rows = rows;
  m.cols = cols;
  for (std::size_t i = 0; i < rows * cols; ++i) {
    m.cells.push_back(cell((mask >> i & 1u) == 0));
  }
  return m;
}

double double_loop_mean(const VerdictMatrix& m) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (!m.at(r, c).usable()) continue;
      total += m.at(r, c).verdict->equivalent ? 0.0 : 1.0;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double pair_count_auroc(const std::vector<double>& scores,
                        const std::vector<int>& labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / static_cast<double>(pairs);
}

// Full divisor scan: intentionally independent of the library primality test.
bool oracle_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d < n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// --- criterion 1: frozen scoring examples -----------------------------------

void criterion_formula_exactness() {
  const double tol = 1e-12;

  std::vector<VerdictCell> all_eq(10, cell(true));
  require_close(score_sc2(all_eq), 0.0, tol, "sc2 all-equivalent");
  std::vector<VerdictCell> all_ineq(10, cell(false));
  require_close(score_sc2(all_ineq), 1.0, tol, "sc2 all-inequivalent");
  std::vector<VerdictCell> mixed = {cell(true), cell(true), cell(false), cell(false)};
  require_close(score_sc2(mixed), 0.5, tol, "sc2 half");

  require_close(score_q(matrix_from_mask(3, 1, 0b111)), 1.0, tol, "q 3x1 inequivalent");
  require_close(score_q(matrix_from_mask(2, 2, 0)), 0.0, tol, "q 2x2 equivalent");
  require_close(score_q(matrix_from_mask(2, 2, 0b1000)), 0.25, tol, "q 2x2 one flip");

  std::vector<VerdictCell> one_bad = {cell(false)};
  require_close(score_m(one_bad), 1.0, tol, "m single disagree");
  std::vector<VerdictCell> one_good = {cell(true)};
  require_close(score_m(one_good), 0.0, tol, "m single agree");
  std::vector<VerdictCell> half = {cell(true), cell(false)};
  require_close(score_m(half), 0.5, tol, "m half");

  require_close(score_qm(matrix_from_mask(3, 1, 0b111)), 1.0, tol, "qm 3x1");
  require_close(score_qm(matrix_from_mask(3, 1, 0)), 0.0, tol, "qm agree");
  require_close(score_qm(matrix_from_mask(3, 1, 0b001)), 1.0 / 3.0, tol, "qm third");

  const CombinedScore combo = score_all(0.5, 1.0, 0.0, 1.0);
  require_close(combo.raw, 1.5, tol, "combined raw");
  require_close(combo.normalized, 0.5, tol, "combined normalized");
  const CombinedScore q_only = score_all(0.7, std::nullopt, std::nullopt, 1.0);
  require_close(q_only.raw, 0.7, tol, "q-only raw");
  require_close(q_only.normalized, 0.7, tol, "q-only normalized");
  const CombinedScore half_weight = score_all(1.0, 1.0, 1.0, 0.5);
  require_close(half_weight.raw, 2.0, tol, "half-weight raw");
  require_close(half_weight.normalized, 1.0, tol, "half-weight normalized");

  std::vector<VerdictCell> uniform = {cell(false, 1.0), cell(true, 1.0)};
  require_close(confidence_weighted_score(uniform), 0.5, tol, "cw uniform");
  std::vector<VerdictCell> skewed = {cell(false, 0.9), cell(true, 0.1)};
  require_close(confidence_weighted_score(skewed), 0.9, tol, "cw skewed");

  require(decide(0.5, 0.5) == Verdict::hallucinated, "tie must flag");
  require(decide(0.49, 0.5) == Verdict::factual, "0.49 must pass");
  require(decide(1.5, 0.5) == Verdict::hallucinated, "raw-mode 1.5 must flag");
}

// --- criterion 2: brute-force matrix oracle ---------------------------------

void criterion_matrix_oracle() {
  std::mt19937_64 rng(20240831);
  std::size_t checked = 0;
  for (std::size_t rows = 1; rows <= 4; ++rows) {
    for (std::size_t cols = 1; cols <= 4; ++cols) {
      const std::size_t bits = rows * cols;
      std::vector<unsigned> masks;
      if (bits <= 12) {
        for (unsigned mask = 0; mask < (1u << bits); ++mask) masks.push_back(mask);
      } else {
        for (int i = 0; i < 1000; ++i) {
          masks.push_back(static_cast<unsigned>(rng() & ((1u << bits) - 1)));
        }
      }
      for (unsigned mask : masks) {
        const VerdictMatrix m = matrix_from_mask(rows, cols, mask);
        const double expected = double_loop_mean(m);
        require_close(score_q(m), expected, 1e-12, "score_q vs oracle");
        require_close(score_qm(m), expected, 1e-12, "score_qm vs oracle");
        ++checked;
      }
    }
  }
  require(checked > 10000, "oracle coverage too small");
}

// --- criterion 3: auroc oracle ----------------------------------------------

void criterion_auroc_oracle() {
  std::mt19937_64 rng(7777);
  std::uniform_int_distribution<int> level(0, 10);  // deliberate ties
  std::uniform_int_distribution<int> coin(0, 1);
  for (int dataset = 0; dataset < 100; ++dataset) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
      scores.push_back(level(rng) / 10.0);
      labels.push_back(coin(rng));
    }
    labels[0] = 1;  // both classes guaranteed
    labels[1] = 0;
    require_close(auroc(scores, labels), pair_count_auroc(scores, labels), 1e-12,
                  "auroc vs pair counting");
  }
}

// --- criterion 4: dataset validity ------------------------------------------

void criterion_dataset_validity() {
  for (std::uint64_t seed : {1ull, 42ull, 20240831ull}) {
    const auto examples = synth_prime(500, 1000, 20000, seed);
    require(examples.size() == 500, "need 500 examples");
    std::set<std::uint64_t> distinct;
    for (const auto& ex : examples) {
      const auto p = ex.metadata.at("number").get<std::uint64_t>();
      require(p >= 1000 && p <= 20000, "prime out of range");
      require(oracle_prime(p), "non-prime in dataset: " + std::to_string(p));
      require(distinct.insert(p).second, "duplicate prime: " + std::to_string(p));
    }
    require(dataset_to_jsonl(examples) ==
                dataset_to_jsonl(synth_prime(500, 1000, 20000, seed)),
            "same seed must reproduce byte-identical output");
  }
  require(dataset_to_jsonl(synth_prime(500, 1000, 20000, 1)) !=
              dataset_to_jsonl(synth_prime(500, 1000, 20000, 2)),
          "different seeds must differ");
}

// --- criteria 5 and 6: scripted mock-world separation ------------------------

struct MockWorldRun {
  std::vector<double> sc2_scores;
  std::vector<double> q_scores;
  std::vector<int> labels;
  bool done = false;
};
MockWorldRun g_world_run;

void run_mock_world() {
  if (g_world_run.done) return;
  const auto prompts = PromptRegistry::defaults();
  const auto dataset = synth_prime(200, 1000, 20000, 1);
  auto backend = std::make_shared<MockBackend>(
      sac3::testing::build_prime_world(dataset, prompts, 3));
  BackendSet backends{backend, backend, backend};

  DetectorConfig config;
  config.k = 3;
  config.n_s = 10;
  config.n_m = 0;
  config.n_q = 1;
  config.n_qm = 0;
  config.target_model = "target-lm";
  DetectorOptions options;
  options.max_parallel = 8;
  Detector detector(config, backends, prompts, options);

  for (const auto& example : dataset) {
    const ScoreReport report =
        detector.detect(make_question(example.question), example.answer);
    require(report.scores.z_sc2.has_value(), "z_sc2 missing in mock world");
    require(report.scores.z_q.has_value(), "z_q missing in mock world");
    g_world_run.sc2_scores.push_back(*report.scores.z_sc2);
    g_world_run.q_scores.push_back(*report.scores.z_q);
    g_world_run.labels.push_back(example.label);
  }
  g_world_run.done = true;
}

void criterion_mock_world_separation() {
  run_mock_world();
  const double sc2_auroc = auroc(g_world_run.sc2_scores, g_world_run.labels);
  const double q_auroc = auroc(g_world_run.q_scores, g_world_run.labels);
  std::ostringstream detail;
  detail << "sc2 auroc " << sc2_auroc << ", q auroc " << q_auroc;
  require(sc2_auroc <= 0.70, "self-checking should fail here: " + detail.str());
  require(q_auroc >= 0.95, "question-level should succeed: " + detail.str());
}

void criterion_consistent_hallucination_histogram() {
  run_mock_world();
  std::size_t hallucinated = 0;
  std::size_t consistent = 0;  // z_sc2 <= 0.1
  std::size_t exposed = 0;     // z_q >= 0.9
  for (std::size_t i = 0; i < g_world_run.labels.size(); ++i) {
    if (g_world_run.labels[i] != 1) continue;
    ++hallucinated;
    if (g_world_run.sc2_scores[i] <= 0.1) ++consistent;
    if (g_world_run.q_scores[i] >= 0.9) ++exposed;
  }
  require(hallucinated > 0, "no hallucinated examples in world");
  const double consistent_share = static_cast<double>(consistent) / hallucinated;
  const double exposed_share = static_cast<double>(exposed) / hallucinated;
  require(consistent_share >= 0.30,
          "hallucinated self-consistent share " + std::to_string(consistent_share));
  require(exposed_share >= 0.90,
          "hallucinated cross-exposed share " + std::to_string(exposed_share));
}

// --- criterion 7: lambda-sweep machinery -------------------------------------

void criterion_lambda_sweep() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ComponentTriple> triples;
  std::vector<int> labels;
  std::vector<double> q_scores;
  for (int i = 0; i < 300; ++i) {
    ComponentTriple t;
    t.z_q = std::round(unit(rng) * 10.0) / 10.0;
    t.z_m = unit(rng);
    t.z_qm = unit(rng);
    triples.push_back(t);
    labels.push_back(static_cast<int>(i % 2));
    q_scores.push_back(*t.z_q);
  }

  const std::vector<double> lambdas = {0.0, 0.25, 0.5, 1.0, 2.0};
  const auto rows = lambda_sweep(triples, labels, lambdas);
  require(rows.size() == lambdas.size(), "lambda sweep row count");

  require(rows[0].auroc == auroc(q_scores, labels),
          "lambda=0 column must equal the question-level auroc bit-for-bit");

  for (const auto& row : rows) {
    std::vector<double> recomputed;
    for (const auto& t : triples) {
      const double raw = *t.z_q + row.lambda * (*t.z_m + *t.z_qm);
      recomputed.push_back(raw / (1.0 + 2.0 * row.lambda));
    }
    require_close(row.auroc, pair_count_auroc(recomputed, labels), 1e-12,
                  "lambda column vs independent recomputation");
  }
}

// --- criterion 8: threshold monotonicity -------------------------------------

void criterion_threshold_monotonicity() {
  run_mock_world();
  // All-hallucinated dataset: the flagged share can only shrink as the
  // threshold rises.
  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t i = 0; i < g_world_run.labels.size(); ++i) {
    if (g_world_run.labels[i] != 1) continue;
    scores.push_back(g_world_run.q_scores[i]);
    scores.push_back(g_world_run.sc2_scores[i]);
    labels.push_back(1);
    labels.push_back(1);
  }
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  const auto rows = threshold_sweep(scores, labels, grid);
  require(rows.size() == 21, "21-point grid expected");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    require(rows[i].accuracy <= rows[i - 1].accuracy + 1e-15,
            "accuracy must be non-increasing in the threshold");
  }
}

// --- criterion 9: cache/resume -----------------------------------------------

void criterion_cache_resume() {
  const auto prompts = PromptRegistry::defaults();
  const auto dataset = synth_prime(10, 1000, 5000, 9);
  auto backend = std::make_shared<MockBackend>(
      sac3::testing::build_prime_world(dataset, prompts, 3));
  BackendSet backends{backend, backend, backend};

  DetectorConfig config;
  config.k = 3;
  config.n_s = 4;
  config.n_m = 0;
  config.n_q = 1;
  config.n_qm = 0;
  config.target_model = "target-lm";

  const fs::path out_dir = fs::temp_directory_path() / "sac3_acceptance_resume";
  fs::remove_all(out_dir);
  EvalOptions options;
  options.out_dir = out_dir;
  options.resume = true;

  const EvalOutcome first = run_eval(dataset, config, backends, prompts, options);
  require(first.n_run == dataset.size(), "first pass must run everything");
  const std::uint64_t calls_after_first = backend->calls();
  require(calls_after_first > 0, "first pass must hit the backend");

  const EvalOutcome second = run_eval(dataset, config, backends, prompts, options);
  require(second.n_run == 0, "second pass must run nothing");
  require(backend->calls() == calls_after_first,
          "resume must issue zero backend calls, saw " +
              std::to_string(backend->calls() - calls_after_first) + " extra");
  require(second.summary.at("n") == dataset.size(), "summary covers all examples");
  fs::remove_all(out_dir);
}

// --- criterion 10: concurrency soundness --------------------------------------

void criterion_concurrency() {
  MockScript script;
  MockRule coin;
  coin.question = "coin?";
  coin.responses = {{"A", 0.4}, {"B", 0.35}, {"C", 0.25}};
  script.rules.push_back(coin);
  script.rules.push_back(sac3::testing::exact_rule("fixed?", "always this"));
  script.seed = 99;

  std::vector<CompletionRequest> requests;
  for (int i = 0; i < 500; ++i) {
    CompletionRequest r;
    r.model = "target-lm";
    r.prompt = (i % 3 == 0) ? "fixed?" : "coin?";
    r.temperature = (i % 5 == 0) ? 0.0 : 1.0;
    r.sample_index = i;
    requests.push_back(std::move(r));
  }

  std::vector<std::vector<CompletionResult>> runs;
  for (int parallel : {1, 8, 64}) {
    MockBackend backend(script);
    runs.push_back(backend.complete_batch(requests, parallel));
    require(runs.back().size() == requests.size(), "batch size mismatch");
  }
  for (std::size_t i = 0; i < requests.size(); ++i) {
    require(runs[0][i].ok && runs[1][i].ok && runs[2][i].ok, "request failed");
    require(runs[0][i].text == runs[1][i].text && runs[0][i].text == runs[2][i].text,
            "results differ across parallelism at index " + std::to_string(i));
  }
}

// --- criterion 11: optional live smoke test -----------------------------------

void criterion_live_smoke() {
  const char* key = std::getenv("SAC3_API_KEY");
  const char* base = std::getenv("SAC3_BASE_URL");
  if (!key || !*key || !base || !*base) {
    throw Skip("set SAC3_API_KEY and SAC3_BASE_URL to run");
  }
  HttpBackendOptions http;
  http.base_url = base;
  http.api_key = key;
  auto backend = std::make_shared<HttpBackend>(http);
  BackendSet backends{backend, backend, backend};

  DetectorConfig config;
  config.k = 2;
  config.n_s = 2;
  config.n_m = 0;
  config.n_qm = 0;
  const char* model = std::getenv("SAC3_LIVE_MODEL");
  if (model && *model) config.target_model = model;

  Detector detector(config, backends, PromptRegistry::defaults(), {});
  const ScoreReport report = detector.detect(make_question("Is 3691 a prime number?"));
  const auto j = report.to_json();
  require(j.contains("scores") && j.contains("verdict") && j.contains("checks"),
          "live report must match the schema");
  require(j.at("verdict") == "hallucinated" || j.at("verdict") == "factual",
          "verdict must be binary");
}

struct Criterion {
  std::string name;
  std::function<void()> run;
  double limit_sec;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"scoring formulas exact to 1e-12", criterion_formula_exactness, 1.0},
      {"matrix scores equal the brute-force oracle", criterion_matrix_oracle, 10.0},
      {"rank auroc equals pair counting on tied data", criterion_auroc_oracle, 5.0},
      {"prime dataset valid, distinct and reproducible", criterion_dataset_validity, 1.0},
      {"mock world: self-check blind, cross-check sharp", criterion_mock_world_separation, 30.0},
      {"hallucinated examples look self-consistent", criterion_consistent_hallucination_histogram, 30.0},
      {"lambda sweep matches independent recomputation", criterion_lambda_sweep, 5.0},
      {"accuracy non-increasing across thresholds", criterion_threshold_monotonicity, 5.0},
      {"resumed eval issues zero backend calls", criterion_cache_resume, 10.0},
      {"batch results identical at parallelism 1/8/64", criterion_concurrency, 10.0},
      {"live endpoint smoke test (credential-gated)", criterion_live_smoke, 120.0},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string status = "PASS";
    std::string detail;
    try {
      criteria[i].run();
    } catch (const Skip& skip) {
      status = "SKIP";
      detail = skip.what();
    } catch (const std::exception& ex) {
      status = "FAIL";
      detail = ex.what();
      ++failures;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (status == "PASS" && elapsed > criteria[i].limit_sec) {
      status = "FAIL";
      detail = "exceeded the " + std::to_string(criteria[i].limit_sec) + "s budget";
      ++failures;
    }
    std::printf("[%2zu] %s  %-48s (%.2fs)%s%s\n", i + 1, status.c_str(),
                criteria[i].name.c_str(), elapsed,
                detail.empty() ? "" : " -- ", detail.c_str());
  }
  if (failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", failures);
  }
  return failures;
}
