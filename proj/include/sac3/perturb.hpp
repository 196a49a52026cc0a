#pragma once

#include <string>
#include <vector>

#include "sac3/backend.hpp"
#include "sac3/prompts.hpp"
#include "sac3/types.hpp"

namespace sac3 {

// Extracts items from numbered ("1.", "1)") or bulleted ("-", "*") lists;
// plain non-empty lines are the fallback. Enumeration markers and
// surrounding whitespace are stripped. Throws ParseError when nothing
// usable is found.
std::vector<std::string> parse_enumerated_list(const std::string& text);

struct PerturbOptions {
  std::string model;
  double temperature = 0.0;
  int max_tokens = 512;
  int max_parallel = 8;
  int sample_index = 0;  // bumped on regeneration so replays stay distinct
};

// Asks the model for k semantically equivalent rephrasings of x0. Candidates
// equal to x0 after normalization are removed, duplicates collapsed, and the
// list truncated to k. May legitimately return fewer than k items.
std::vector<Question> generate_perturbations(const Question& x0, int k,
                                             Backend& backend,
                                             const PromptRegistry& prompts,
                                             const PerturbOptions& options);

// Keeps the candidates whose pairwise equivalence check against x0 answers
// affirmatively; order is preserved. Unreadable checker output drops the
// candidate (fail-closed).
std::vector<Question> filter_equivalent(const Question& x0,
                                        const std::vector<Question>& candidates,
                                        Backend& backend,
                                        const PromptRegistry& prompts,
                                        const PerturbOptions& options);

// First token "yes"/"no" (case-insensitive, punctuation ignored) wins;
// returns nullopt when neither appears.
std::optional<bool> parse_yes_no(const std::string& text);

}  // namespace sac3
