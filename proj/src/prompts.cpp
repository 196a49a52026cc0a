#include "sac3/prompts.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace sac3 {

namespace {

const char* kPerturbTemplate =
    "For the question [QUERIED QUESTION], provide ${k} semantically "
    "equivalent questions";

const char* kPairEquivalenceTemplate =
    "Are the following two inputs semantically equivalent?\n"
    "[QUERIED INPUT]\n"
    "[GENERATED INPUT]";

const char* kQaPairEquivalenceTemplate =
    "Are the following two Question-Answering (QA) pairs semantically "
    "equivalent? Provide your best guess and the probability that it is "
    "correct (0.0 to 1.0). Given ONLY the guess (Yes or No) and probability, "
    "no other words or explanation. For example:\n"
    "Guess: <most likely guess, as short as possible; not a complete "
    "sentence, just the guess!>\n"
    "Probability: <the probability between 0.0 and 1.0 that your guess is "
    "correct, without any extra commentary whatsoever; just the "
    "probability!>\n"
    "\n"
    "The first QA pair is:\n"
    "Q: ${THE QUESTION}\n"
    "A: ${THE ANSWER}\n"
    "The second QA pair is:\n"
    "Q: ${THE QUESTION}\n"
    "A: ${THE ANSWER}";

}  // namespace

PromptRegistry PromptRegistry::defaults() {
  PromptRegistry registry;
  registry.templates_["perturb"] = kPerturbTemplate;
  registry.templates_["pair-equivalence"] = kPairEquivalenceTemplate;
  registry.templates_["qa-pair-equivalence"] = kQaPairEquivalenceTemplate;
  return registry;
}

PromptRegistry PromptRegistry::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open prompt registry: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError("invalid prompt registry JSON: " + std::string(ex.what()));
  }
  if (!j.is_object()) throw ConfigError("prompt registry must be a JSON object");
  PromptRegistry registry = defaults();
  for (const auto& item : j.items()) {
    if (!item.value().is_string()) {
      throw ConfigError("prompt template for '" + item.key() + "' must be a string");
    }
    registry.templates_[item.key()] = item.value().get<std::string>();
  }
  return registry;
}

const std::string& PromptRegistry::get(const std::string& purpose) const {
  auto it = templates_.find(purpose);
  if (it == templates_.end()) {
    throw ConfigError("no prompt template registered for '" + purpose + "'");
  }
  return it->second;
}

void PromptRegistry::set(const std::string& purpose, std::string tmpl) {
  templates_[purpose] = std::move(tmpl);
}

bool substitute_first(std::string& text, const std::string& slot,
                      const std::string& value) {
  const auto pos = text.find(slot);
  if (pos == std::string::npos) return false;
  text.replace(pos, slot.size(), value);
  return true;
}

std::string render_perturb_prompt(const PromptRegistry& prompts,
                                  const std::string& question, int k) {
  std::string out = prompts.get("perturb");
  substitute_first(out, "[QUERIED QUESTION]", question);
  substitute_first(out, "${k}", std::to_string(k));
  return out;
}

std::string render_input_equivalence_prompt(const PromptRegistry& prompts,
                                            const std::string& original,
                                            const std::string& generated) {
  std::string out = prompts.get("pair-equivalence");
  substitute_first(out, "[QUERIED INPUT]", original);
  substitute_first(out, "[GENERATED INPUT]", generated);
  return out;
}

std::string render_qa_equivalence_prompt(const PromptRegistry& prompts,
                                         const QAPair& first,
                                         const QAPair& second) {
  std::string out = prompts.get("qa-pair-equivalence");
  substitute_first(out, "${THE QUESTION}", first.question.text);
  substitute_first(out, "${THE ANSWER}", first.answer.text);
  substitute_first(out, "${THE QUESTION}", second.question.text);
  substitute_first(out, "${THE ANSWER}", second.answer.text);
  return out;
}

}  // namespace sac3
