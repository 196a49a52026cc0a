// Python bindings for the main operations: scoring, evaluation metrics,
// dataset synthesis, output parsing and the end-to-end detector.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sac3/checker.hpp"
#include "sac3/config.hpp"
#include "sac3/datasets.hpp"
#include "sac3/detector.hpp"
#include "sac3/eval.hpp"
#include "sac3/http_backend.hpp"
#include "sac3/mock_backend.hpp"
#include "sac3/perturb.hpp"
#include "sac3/prompts.hpp"
#include "sac3/scoring.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<json::number_integer_t>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<json::number_unsigned_t>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& item : j.items()) {
        out[py::str(item.key())] = json_to_py(item.value());
      }
      return out;
    }
    default:
      return py::none();
  }
}

json py_to_json(const py::handle& obj) {
  if (obj.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
  if (py::isinstance<py::int_>(obj)) return obj.cast<json::number_integer_t>();
  if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  if (py::isinstance<py::dict>(obj)) {
    json out = json::object();
    for (const auto& item : obj.cast<py::dict>()) {
      out[item.first.cast<std::string>()] = py_to_json(item.second);
    }
    return out;
  }
  if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
    json out = json::array();
    for (const auto& item : obj.cast<py::sequence>()) out.push_back(py_to_json(item));
    return out;
  }
  throw py::type_error("value is not convertible to JSON");
}

using PyVerdict = std::pair<bool, double>;  // (equivalent, confidence)

std::vector<sac3::VerdictCell> cells_from(const std::vector<PyVerdict>& verdicts) {
  std::vector<sac3::VerdictCell> cells;
  cells.reserve(verdicts.size());
  for (const auto& [equivalent, confidence] : verdicts) {
    sac3::VerdictCell cell;
    cell.verdict = sac3::EquivalenceVerdict{equivalent, confidence, ""};
    cells.push_back(std::move(cell));
  }
  return cells;
}

sac3::VerdictMatrix matrix_from(const std::vector<std::vector<PyVerdict>>& rows) {
  sac3::VerdictMatrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != m.cols) {
      throw sac3::ScoringError("ragged verdict matrix");
    }
    for (const auto& cell : cells_from(row)) m.cells.push_back(cell);
  }
  return m;
}

std::vector<sac3::LabeledExample> examples_from(const py::sequence& seq) {
  std::vector<sac3::LabeledExample> out;
  for (const auto& item : seq) {
    const json j = py_to_json(item);
    sac3::LabeledExample ex;
    ex.question = j.at("question").get<std::string>();
    ex.answer = j.at("answer").get<std::string>();
    ex.label = j.at("label").get<int>();
    if (j.contains("metadata")) ex.metadata = j.at("metadata");
    out.push_back(std::move(ex));
  }
  return out;
}

py::list examples_to_py(const std::vector<sac3::LabeledExample>& examples) {
  py::list out;
  for (const auto& ex : examples) {
    py::dict d;
    d["question"] = ex.question;
    d["answer"] = ex.answer;
    d["label"] = ex.label;
    d["metadata"] = json_to_py(ex.metadata);
    out.append(d);
  }
  return out;
}

py::dict detect_py(const std::string& question,
                   const std::optional<std::string>& answer, const py::object& config,
                   const py::object& script, const std::optional<std::string>& script_path,
                   const std::optional<std::string>& base_url,
                   const std::optional<std::string>& api_key, int max_parallel,
                   bool regenerate) {
  sac3::DetectorConfig cfg;
  if (!config.is_none()) cfg = sac3::config_from_json(py_to_json(config));

  std::shared_ptr<sac3::Backend> backend;
  if (!script.is_none()) {
    backend = std::make_shared<sac3::MockBackend>(
        sac3::MockScript::from_json(py_to_json(script)));
  } else if (script_path) {
    backend = std::make_shared<sac3::MockBackend>(
        sac3::MockScript::from_file(*script_path));
  } else {
    sac3::HttpBackendOptions http;
    if (base_url) {
      http.base_url = *base_url;
    } else if (const char* env = std::getenv("SAC3_BASE_URL")) {
      http.base_url = env;
    } else {
      http.base_url = "https://api.openai.com/v1";
    }
    if (api_key) {
      http.api_key = *api_key;
    } else if (const char* env = std::getenv("SAC3_API_KEY")) {
      http.api_key = env;
    }
    backend = std::make_shared<sac3::HttpBackend>(http);
  }

  sac3::BackendSet backends{backend, backend, backend};
  sac3::DetectorOptions options;
  options.max_parallel = max_parallel;
  options.regenerate = regenerate;
  sac3::Detector detector(cfg, backends, sac3::PromptRegistry::defaults(), options);

  json report;
  {
    py::gil_scoped_release release;
    report = detector.detect(sac3::make_question(question), answer).to_json();
  }
  return json_to_py(report).cast<py::dict>();
}

}  // namespace

PYBIND11_MODULE(_sac3, m) {
  m.doc() = "Semantic-aware cross-check consistency hallucination detection";

  py::register_exception<sac3::Error>(m, "Sac3Error");

  // scoring
  m.def(
      "score_sc2",
      [](const std::vector<PyVerdict>& v) { return sac3::score_sc2(cells_from(v)); },
      py::arg("verdicts"),
      "Self-consistency score from (equivalent, confidence) verdicts.");
  m.def(
      "score_m",
      [](const std::vector<PyVerdict>& v) { return sac3::score_m(cells_from(v)); },
      py::arg("verdicts"));
  m.def(
      "score_q",
      [](const std::vector<std::vector<PyVerdict>>& rows) {
        return sac3::score_q(matrix_from(rows));
      },
      py::arg("matrix"), "Question-level score over a k x n verdict matrix.");
  m.def(
      "score_qm",
      [](const std::vector<std::vector<PyVerdict>>& rows) {
        return sac3::score_qm(matrix_from(rows));
      },
      py::arg("matrix"));
  m.def(
      "score_all",
      [](std::optional<double> z_q, std::optional<double> z_m,
         std::optional<double> z_qm, double lambda_weight) {
        const auto combined = sac3::score_all(z_q, z_m, z_qm, lambda_weight);
        return std::make_pair(combined.raw, combined.normalized);
      },
      py::arg("z_q"), py::arg("z_m"), py::arg("z_qm"), py::arg("lambda_weight") = 1.0,
      "Combined score; returns (raw, normalized).");
  m.def(
      "confidence_weighted_score",
      [](const std::vector<PyVerdict>& v) {
        return sac3::confidence_weighted_score(cells_from(v));
      },
      py::arg("verdicts"));

  // evaluation metrics
  m.def("auroc", &sac3::auroc, py::arg("scores"), py::arg("labels"));
  m.def("accuracy_at_threshold", &sac3::accuracy_at_threshold, py::arg("scores"),
        py::arg("labels"), py::arg("threshold"));
  m.def(
      "threshold_sweep",
      [](const std::vector<double>& scores, const std::vector<int>& labels,
         const std::vector<double>& grid) {
        std::vector<std::pair<double, double>> out;
        for (const auto& row : sac3::threshold_sweep(scores, labels, grid)) {
          out.emplace_back(row.threshold, row.accuracy);
        }
        return out;
      },
      py::arg("scores"), py::arg("labels"), py::arg("grid"));
  m.def(
      "lambda_sweep",
      [](const std::vector<std::tuple<std::optional<double>, std::optional<double>,
                                      std::optional<double>>>& triples,
         const std::vector<int>& labels, const std::vector<double>& lambdas) {
        std::vector<sac3::ComponentTriple> converted;
        for (const auto& [q, mm, qm] : triples) converted.push_back({q, mm, qm});
        std::vector<std::pair<double, double>> out;
        for (const auto& row : sac3::lambda_sweep(converted, labels, lambdas)) {
          out.emplace_back(row.lambda, row.auroc);
        }
        return out;
      },
      py::arg("triples"), py::arg("labels"), py::arg("lambdas"));
  m.def(
      "histogram",
      [](const std::vector<double>& scores, std::size_t bins, double lo, double hi) {
        return sac3::histogram(scores, bins, lo, hi);
      },
      py::arg("scores"), py::arg("bins"), py::arg("lo") = 0.0, py::arg("hi") = 1.0);

  // parsing
  m.def("parse_guess_probability", &sac3::parse_guess_probability, py::arg("text"),
        "Returns (guess_is_yes, probability) from a judge answer.");
  m.def("parse_enumerated_list", &sac3::parse_enumerated_list, py::arg("text"));
  m.def("parse_yes_no", &sac3::parse_yes_no, py::arg("text"));

  // prompts
  m.def("prompt_templates", [] {
    return json_to_py(json(sac3::PromptRegistry::defaults().all()));
  });
  m.def(
      "render_perturb_prompt",
      [](const std::string& question, int k) {
        return sac3::render_perturb_prompt(sac3::PromptRegistry::defaults(), question, k);
      },
      py::arg("question"), py::arg("k"));

  // datasets
  m.def(
      "synth_prime",
      [](int n, std::uint64_t lo, std::uint64_t hi, std::uint64_t seed,
         const std::string& mix) {
        return examples_to_py(
            sac3::synth_prime(n, lo, hi, seed, sac3::label_mix_from_string(mix)));
      },
      py::arg("n"), py::arg("lo") = 1000, py::arg("hi") = 20000, py::arg("seed") = 0,
      py::arg("mix") = "balanced");
  m.def(
      "synth_senator",
      [](int n, std::uint64_t seed, const std::string& mix) {
        return examples_to_py(
            sac3::synth_senator(n, seed, sac3::label_mix_from_string(mix)));
      },
      py::arg("n"), py::arg("seed") = 0, py::arg("mix") = "balanced");
  m.def("is_prime", &sac3::is_prime, py::arg("n"));
  m.def(
      "load_dataset",
      [](const std::string& path) { return examples_to_py(sac3::load_annotated(path)); },
      py::arg("path"));
  m.def(
      "save_dataset",
      [](const py::sequence& examples, const std::string& path) {
        sac3::save_dataset(examples_from(examples), path);
      },
      py::arg("examples"), py::arg("path"));

  // config
  m.def("default_config",
        [] { return json_to_py(sac3::config_to_json(sac3::DetectorConfig{})); });
  m.def(
      "validate_config",
      [](const py::dict& config) {
        return json_to_py(sac3::config_to_json(
            sac3::validate_config(sac3::config_from_json(py_to_json(config)))));
      },
      py::arg("config"));

  // pipeline
  m.def("detect", &detect_py, py::arg("question"), py::arg("answer") = py::none(),
        py::arg("config") = py::none(), py::arg("script") = py::none(),
        py::arg("script_path") = py::none(), py::arg("base_url") = py::none(),
        py::arg("api_key") = py::none(), py::arg("max_parallel") = 8,
        py::arg("regenerate") = false,
        "Full pipeline over one question; returns the report as a dict. "
        "Pass `script`/`script_path` for the offline mock backend, otherwise "
        "an OpenAI-compatible endpoint is used.");
}
