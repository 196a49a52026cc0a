#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sac3/backend.hpp"
#include "sac3/config.hpp"
#include "sac3/types.hpp"

namespace sac3 {

// An answer slot that may have failed. Failed cells are kept in place (the
// matrix shape never lies about what was requested) and excluded from score
// denominators downstream; they are never imputed.
struct SampleCell {
  std::optional<Answer> answer;
  std::string error;

  bool ok() const { return answer.has_value(); }
};

// The four response collections drawn in the sampling stage: stochastic
// self-samples of the target, verifier samples on the original question,
// and the two k-row cross matrices over the perturbed questions.
struct SampleSet {
  std::vector<SampleCell> self_target;                  // n_s
  std::vector<SampleCell> self_verifier;                // n_m
  std::vector<std::vector<SampleCell>> cross_target;    // k x n_q
  std::vector<std::vector<SampleCell>> cross_verifier;  // k x n_qm
  std::vector<Question> perturbed_questions;            // k

  // Row counts must equal the perturbed question count and at least one
  // collection must be non-empty.
  void validate() const;
};

// The models used by the pipeline. Target, verifier and checker may share
// one Backend object (one mock, or one endpoint with different model ids).
struct BackendSet {
  std::shared_ptr<Backend> target;
  std::shared_ptr<Backend> verifier;
  std::shared_ptr<Backend> checker;
};

std::vector<SampleCell> sample_self(Backend& target, const std::string& model,
                                    const Question& x0, int n_s, double temp,
                                    int max_parallel, int max_tokens);

std::vector<SampleCell> sample_verifier(Backend& verifier, const std::string& model,
                                        const Question& x0, int n_m, double temp,
                                        int max_parallel, int max_tokens);

// Row j of the result holds n_per_question samples for questions[j].
std::vector<std::vector<SampleCell>> sample_cross(
    Backend& backend, const std::string& model,
    const std::vector<Question>& questions, int n_per_question, double temp,
    int max_parallel, int max_tokens);

// Draws all four collections. Requests are grouped per backend object and
// issued as bounded-parallel batches, so independent cells run concurrently.
SampleSet build_sample_set(const DetectorConfig& config, const Question& x0,
                           const std::vector<Question>& perturbed,
                           const BackendSet& backends, int max_parallel);

}  // namespace sac3
