#include "sac3/checker.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <regex>

namespace sac3 {

namespace {

const std::regex kGuessRe(R"(guess\s*:\s*([A-Za-z]+))", std::regex::icase);
const std::regex kProbabilityRe(R"(probability\s*:\s*([0-9]*\.?[0-9]+([eE][+-]?[0-9]+)?))",
                                std::regex::icase);

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::pair<bool, double> parse_guess_probability(const std::string& text) {
  std::smatch guess_match;
  if (!std::regex_search(text, guess_match, kGuessRe)) {
    throw ParseError("no Guess line in checker output", text);
  }
  const std::string guess = lower(guess_match[1].str());
  bool yes;
  if (guess == "yes") {
    yes = true;
  } else if (guess == "no") {
    yes = false;
  } else {
    throw ParseError("guess is neither Yes nor No: " + guess, text);
  }

  double probability = 1.0;
  std::smatch prob_match;
  if (std::regex_search(text, prob_match, kProbabilityRe)) {
    try {
      probability = std::stod(prob_match[1].str());
    } catch (const std::exception&) {
      std::cerr << "[sac3] non-numeric probability in checker output; using 1.0\n";
      probability = 1.0;
    }
  } else {
    std::cerr << "[sac3] missing probability in checker output; using 1.0\n";
  }
  probability = std::clamp(probability, 0.0, 1.0);
  return {yes, probability};
}

EquivalenceVerdict check_pair(const QAPair& p0, const QAPair& pi,
                              Backend& backend, const PromptRegistry& prompts,
                              const CheckerOptions& options) {
  if (p0.question.text.empty() || pi.question.text.empty()) {
    throw ConfigError("cannot check an empty QA pair");
  }
  CompletionRequest request;
  request.model = options.model;
  request.prompt = render_qa_equivalence_prompt(prompts, p0, pi);
  request.temperature = options.temperature;
  request.max_tokens = options.max_tokens;

  const std::string raw = backend.complete(request);
  const auto [yes, probability] = parse_guess_probability(raw);
  return EquivalenceVerdict{yes, probability, raw};
}

std::vector<VerdictCell> check_pair_batch(const QAPair& p0,
                                          const std::vector<QAPair>& pairs,
                                          Backend& backend,
                                          const PromptRegistry& prompts,
                                          const CheckerOptions& options) {
  std::vector<CompletionRequest> requests;
  requests.reserve(pairs.size());
  for (const QAPair& pair : pairs) {
    CompletionRequest request;
    request.model = options.model;
    request.prompt = render_qa_equivalence_prompt(prompts, p0, pair);
    request.temperature = options.temperature;
    request.max_tokens = options.max_tokens;
    requests.push_back(std::move(request));
  }

  const auto results = backend.complete_batch(requests, options.max_parallel);
  std::vector<VerdictCell> cells(pairs.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok) {
      cells[i].error = results[i].error;
      continue;
    }
    cells[i].raw = results[i].text;
    try {
      const auto [yes, probability] = parse_guess_probability(results[i].text);
      cells[i].verdict = EquivalenceVerdict{yes, probability, results[i].text};
    } catch (const ParseError& ex) {
      cells[i].error = ex.what();
      cells[i].parse_failed = true;
    }
  }
  return cells;
}

}  // namespace sac3
