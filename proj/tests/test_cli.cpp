#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sac3/datasets.hpp"
#include "sac3/mock_backend.hpp"
#include "sac3/prompts.hpp"

#include "mock_world.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "sac3_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int invocation = 0;
  const fs::path out_path = work_dir() / ("stdout_" + std::to_string(invocation));
  const fs::path err_path = work_dir() / ("stderr_" + std::to_string(invocation));
  ++invocation;
  const std::string command = std::string(SAC3_CLI_PATH) + " " + args + " >" +
                              out_path.string() + " 2>" + err_path.string();
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(status);
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

fs::path table1_script_path() {
  static const fs::path path = [] {
    const auto script = sac3::testing::build_table1_world(
        sac3::PromptRegistry::defaults(), "target-lm", "verifier-lm");
    const fs::path p = work_dir() / "table1.json";
    std::ofstream out(p);
    out << script.to_json().dump(2);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("cli: detect against the scripted world flags the canonical question") {
  const std::string args =
      "--backend mock --script " + table1_script_path().string() +
      " --target-model target-lm --verifier-model verifier-lm"
      " detect --question \"Is 3691 a prime number?\" --k 3 --n-s 10 --n-m 1"
      " --n-q 1 --n-qm 1";
  const CliResult result = run_cli(args);
  REQUIRE(result.exit_code == 0);
  const json report = json::parse(result.out);
  CHECK(report.at("scores").at("z_q") == 1.0);
  CHECK(report.at("scores").at("z_sc2") == 0.0);
  CHECK(report.at("verdict") == "hallucinated");
}

TEST_CASE("cli: missing required flags exit nonzero") {
  CHECK(run_cli("detect").exit_code != 0);
  CHECK(run_cli("synth bogus").exit_code != 0);
  CHECK(run_cli("").exit_code != 0);
}

TEST_CASE("cli: self-only detection produces an SC2-only report") {
  const std::string args =
      "--backend mock --script " + table1_script_path().string() +
      " --target-model target-lm detect --question \"Is 3691 a prime number?\""
      " --k 0 --n-m 0 --n-qm 0";
  const CliResult result = run_cli(args);
  REQUIRE(result.exit_code == 0);
  const json report = json::parse(result.out);
  CHECK(report.at("scores").at("z_q").is_null());
  CHECK(report.at("scores").at("z_qm").is_null());
  CHECK(report.at("decision_basis") == "z_sc2");
}

TEST_CASE("cli: synth prime emits reproducible, valid JSONL") {
  const fs::path a = work_dir() / "prime_a.jsonl";
  const fs::path b = work_dir() / "prime_b.jsonl";
  REQUIRE(run_cli("--out " + a.string() + " synth prime --n 50 --seed 7").exit_code == 0);
  REQUIRE(run_cli("--out " + b.string() + " synth prime --n 50 --seed 7").exit_code == 0);
  CHECK(slurp(a) == slurp(b));

  const auto examples = sac3::load_annotated(a);
  REQUIRE(examples.size() == 50);
  for (const auto& ex : examples) {
    CHECK(sac3::is_prime(ex.metadata.at("number").get<std::uint64_t>()));
  }
}

TEST_CASE("cli: synth senator renders the template") {
  const CliResult result = run_cli("synth senator --n 3 --seed 1");
  REQUIRE(result.exit_code == 0);
  std::istringstream lines(result.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    const std::string q = j.at("question");
    CHECK(q.find("Was there ever a US senator that represented the state of") == 0);
    ++count;
  }
  CHECK(count == 3);
}

TEST_CASE("cli: eval, resume and sweeps over a mock prime world") {
  // Small balanced world the mock can answer deterministically.
  const auto prompts = sac3::PromptRegistry::defaults();
  const auto dataset = sac3::synth_prime(10, 1000, 5000, 3);
  const fs::path dataset_path = work_dir() / "prime_eval.jsonl";
  sac3::save_dataset(dataset, dataset_path);
  const auto script = sac3::testing::build_prime_world(dataset, prompts, 3);
  const fs::path script_path = work_dir() / "prime_world.json";
  {
    std::ofstream out(script_path);
    out << script.to_json().dump();
  }

  // The verifier is absent in this world: question-level checks only.
  const fs::path config_path = work_dir() / "prime_config.json";
  {
    std::ofstream out(config_path);
    out << R"({"k": 3, "n_s": 5, "n_m": 0, "n_q": 1, "n_qm": 0,)"
        << R"( "target_model": "target-lm"})";
  }

  const fs::path run_dir = work_dir() / "run";
  const std::string base = "--backend mock --script " + script_path.string() +
                           " --config " + config_path.string() + " --out " +
                           run_dir.string();
  const std::string eval_args = base + " eval --dataset " + dataset_path.string() +
                                " --resume";
  const CliResult first = run_cli(eval_args);
  REQUIRE(first.exit_code == 0);
  CHECK(first.err.find("ran 10/10") != std::string::npos);
  REQUIRE(fs::exists(run_dir / "reports.jsonl"));
  REQUIRE(fs::exists(run_dir / "summary.json"));

  const json summary = json::parse(first.out);
  CHECK(summary.at("auroc").contains("z_sc2"));
  CHECK(summary.at("auroc").contains("z_q"));
  CHECK(summary.at("auroc").at("z_q").get<double>() > 0.95);

  // Resume over the finished run re-executes nothing.
  const CliResult second = run_cli(eval_args);
  REQUIRE(second.exit_code == 0);
  CHECK(second.err.find("ran 0/10") != std::string::npos);

  // Sweeps reuse the persisted run.
  const fs::path table_path = work_dir() / "thresholds.jsonl";
  const CliResult sweep = run_cli("--out " + table_path.string() +
                                  " sweep threshold --run " + run_dir.string() +
                                  " --score z_q --grid-points 5");
  REQUIRE(sweep.exit_code == 0);
  int rows = 0;
  std::istringstream table(slurp(table_path));
  std::string line;
  double last_accuracy = 2.0;
  (void)last_accuracy;
  while (std::getline(table, line)) {
    const json row = json::parse(line);
    CHECK(row.contains("threshold"));
    CHECK(row.contains("accuracy"));
    ++rows;
  }
  CHECK(rows == 5);

  const CliResult lambda = run_cli("sweep lambda --run " + run_dir.string() +
                                   " --lambdas 0,1 --format csv");
  REQUIRE(lambda.exit_code == 0);
  CHECK(lambda.out.find("lambda,auroc") != std::string::npos);

  const CliResult k_sweep = run_cli("sweep k --run " + run_dir.string());
  REQUIRE(k_sweep.exit_code == 0);
  CHECK(json::parse(k_sweep.out.substr(0, k_sweep.out.find('\n'))).at("k") == 1);
}

TEST_CASE("cli: malformed datasets report the line number") {
  const fs::path bad = work_dir() / "bad.jsonl";
  {
    std::ofstream out(bad);
    out << R"({"question":"q","answer":"a","label":1})" << "\n";
    out << R"({"question":"q","answer":"a"})" << "\n";
  }
  const CliResult result = run_cli("--backend mock --script " +
                                   table1_script_path().string() + " --out " +
                                   (work_dir() / "bad_run").string() +
                                   " eval --dataset " + bad.string());
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("line 2") != std::string::npos);
}

TEST_CASE("cli: unknown config keys fail fast") {
  const fs::path config_path = work_dir() / "config.json";
  {
    std::ofstream out(config_path);
    out << R"({"k": 3, "mystery": true})";
  }
  const CliResult result = run_cli("--config " + config_path.string() +
                                   " --backend mock --script " +
                                   table1_script_path().string() +
                                   " detect --question \"Q?\"");
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("unknown config key: mystery") != std::string::npos);
}

TEST_CASE("cli: cache stats and clear") {
  const fs::path cache_dir = work_dir() / "cache";
  const std::string detect_args =
      "--backend mock --script " + table1_script_path().string() +
      " --cache-dir " + cache_dir.string() +
      " --target-model target-lm --verifier-model verifier-lm"
      " detect --question \"Is 3691 a prime number?\" --k 3";
  REQUIRE(run_cli(detect_args).exit_code == 0);

  const CliResult stats = run_cli("--cache-dir " + cache_dir.string() + " cache stats");
  REQUIRE(stats.exit_code == 0);
  const json parsed = json::parse(stats.out);
  CHECK(parsed.at("entries").get<int>() > 0);

  REQUIRE(run_cli("--cache-dir " + cache_dir.string() + " cache clear").exit_code == 0);
  const CliResult after = run_cli("--cache-dir " + cache_dir.string() + " cache stats");
  CHECK(json::parse(after.out).at("entries") == 0);

  CHECK(run_cli("cache stats").exit_code == 1);
}
