#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "sac3/types.hpp"

namespace sac3 {

// Prompt templates keyed by purpose. The built-in defaults can be overridden
// per key from a JSON registry file ({"purpose": "template", ...}).
//
// Known purposes:
//   "perturb"             slots [QUERIED QUESTION], ${k}
//   "pair-equivalence"    slots [QUERIED INPUT], [GENERATED INPUT]
//   "qa-pair-equivalence" slots ${THE QUESTION}, ${THE ANSWER} (twice each,
//                         first pair then second pair)
class PromptRegistry {
public:
  static PromptRegistry defaults();

  // Defaults plus overrides from the file; unknown keys are accepted so users
  // can register extra purposes.
  static PromptRegistry from_file(const std::filesystem::path& path);

  const std::string& get(const std::string& purpose) const;
  void set(const std::string& purpose, std::string tmpl);

  const std::map<std::string, std::string>& all() const { return templates_; }

private:
  std::map<std::string, std::string> templates_;
};

// Replaces the first occurrence of slot in text. Returns false if absent.
bool substitute_first(std::string& text, const std::string& slot,
                      const std::string& value);

std::string render_perturb_prompt(const PromptRegistry& prompts,
                                  const std::string& question, int k);

std::string render_input_equivalence_prompt(const PromptRegistry& prompts,
                                            const std::string& original,
                                            const std::string& generated);

std::string render_qa_equivalence_prompt(const PromptRegistry& prompts,
                                         const QAPair& first,
                                         const QAPair& second);

}  // namespace sac3
