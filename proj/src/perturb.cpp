#include "sac3/perturb.hpp"

#include <cctype>
#include <iostream>
#include <set>
#include <sstream>

namespace sac3 {

namespace {

// Strips a leading enumeration marker: "1.", "12)", "-", "*", "•".
std::string strip_marker(const std::string& line) {
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  std::size_t digits = i;
  while (digits < n && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
  if (digits > i && digits < n && (line[digits] == '.' || line[digits] == ')')) {
    return trim(line.substr(digits + 1));
  }
  if (i < n && (line[i] == '-' || line[i] == '*')) {
    return trim(line.substr(i + 1));
  }
  static const std::string bullet = "\xe2\x80\xa2";  // U+2022
  if (line.compare(i, bullet.size(), bullet) == 0) {
    return trim(line.substr(i + bullet.size()));
  }
  return trim(line);
}

bool has_enumeration_marker(const std::string& line) {
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  if (i < n && (line[i] == '-' || line[i] == '*')) return true;
  static const std::string bullet = "\xe2\x80\xa2";
  if (line.compare(i, bullet.size(), bullet) == 0) return true;
  std::size_t digits = i;
  while (digits < n && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
  return digits > i && digits < n && (line[digits] == '.' || line[digits] == ')');
}

}  // namespace

std::vector<std::string> parse_enumerated_list(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream stream(text);
  std::string line;
  bool any_marker = false;
  while (std::getline(stream, line)) {
    if (trim(line).empty()) continue;
    any_marker = any_marker || has_enumeration_marker(line);
    lines.push_back(line);
  }

  std::vector<std::string> items;
  for (const std::string& raw : lines) {
    if (any_marker && !has_enumeration_marker(raw)) continue;  // skip chatter
    std::string item = strip_marker(raw);
    if (!item.empty()) items.push_back(std::move(item));
  }
  if (items.empty()) {
    throw ParseError("no list items found in model output", text);
  }
  return items;
}

std::optional<bool> parse_yes_no(const std::string& text) {
  std::string token;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const bool alpha =
        i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]));
    if (alpha) {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
      continue;
    }
    if (token == "yes") return true;
    if (token == "no") return false;
    token.clear();
  }
  return std::nullopt;
}

std::vector<Question> generate_perturbations(const Question& x0, int k,
                                             Backend& backend,
                                             const PromptRegistry& prompts,
                                             const PerturbOptions& options) {
  if (k < 1) throw ConfigError("perturbation count must be >= 1");

  CompletionRequest request;
  request.model = options.model;
  request.prompt = render_perturb_prompt(prompts, x0.text, k);
  request.temperature = options.temperature;
  request.sample_index = options.sample_index;
  request.max_tokens = options.max_tokens;

  const std::string raw = backend.complete(request);
  std::vector<std::string> items = parse_enumerated_list(raw);

  const std::string self = normalize_text(x0.text);
  std::set<std::string> seen;
  std::vector<Question> out;
  for (std::string& item : items) {
    if (static_cast<int>(out.size()) >= k) break;
    const std::string norm = normalize_text(item);
    if (norm.empty() || norm == self) continue;
    if (!seen.insert(norm).second) continue;
    out.push_back(Question{std::move(item),
                           "x" + std::to_string(out.size() + 1)});
  }
  return out;
}

std::vector<Question> filter_equivalent(const Question& x0,
                                        const std::vector<Question>& candidates,
                                        Backend& backend,
                                        const PromptRegistry& prompts,
                                        const PerturbOptions& options) {
  if (candidates.empty()) return {};

  std::vector<CompletionRequest> requests;
  requests.reserve(candidates.size());
  for (const Question& candidate : candidates) {
    CompletionRequest request;
    request.model = options.model;
    request.prompt = render_input_equivalence_prompt(prompts, x0.text, candidate.text);
    request.temperature = options.temperature;
    request.sample_index = options.sample_index;
    request.max_tokens = options.max_tokens;
    requests.push_back(std::move(request));
  }

  const auto results = backend.complete_batch(requests, options.max_parallel);
  std::vector<Question> kept;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!results[i].ok) {
      std::cerr << "[sac3] equivalence check failed for candidate " << i
                << ": " << results[i].error << " (dropped)\n";
      continue;
    }
    const auto verdict = parse_yes_no(results[i].text);
    if (!verdict.has_value()) {
      std::cerr << "[sac3] unreadable equivalence answer for candidate " << i
                << " (dropped): " << results[i].text.substr(0, 80) << "\n";
      continue;
    }
    if (*verdict) kept.push_back(candidates[i]);
  }
  return kept;
}

}  // namespace sac3
