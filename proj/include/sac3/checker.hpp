#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sac3/backend.hpp"
#include "sac3/prompts.hpp"
#include "sac3/types.hpp"

namespace sac3 {

struct CheckerOptions {
  std::string model;
  double temperature = 0.0;
  int max_tokens = 64;
  int max_parallel = 8;
};

// Parses the judge's two-line answer format:
//   Guess: <Yes|No>
//   Probability: <0.0 .. 1.0>
// The guess is required (ParseError otherwise). A missing or non-numeric
// probability falls back to 1.0 with a warning; parsed values are clamped
// to [0, 1]. Returns (guess_is_yes, probability).
std::pair<bool, double> parse_guess_probability(const std::string& text);

// Maps a verdict to its numeric score: equivalent -> 0.0, not -> 1.0.
inline double verdict_to_score(const EquivalenceVerdict& v) {
  return v.equivalent ? 0.0 : 1.0;
}

// Runs the semantic equivalence operator on two QA pairs.
EquivalenceVerdict check_pair(const QAPair& p0, const QAPair& pi,
                              Backend& backend, const PromptRegistry& prompts,
                              const CheckerOptions& options);

// Bounded-parallel batch of checks of p0 against each pair; results are
// positional, failures stay in their slot as unusable cells.
std::vector<VerdictCell> check_pair_batch(const QAPair& p0,
                                          const std::vector<QAPair>& pairs,
                                          Backend& backend,
                                          const PromptRegistry& prompts,
                                          const CheckerOptions& options);

}  // namespace sac3
