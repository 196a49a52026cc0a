#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sac3/types.hpp"

namespace sac3 {

struct CompletionRequest {
  std::string model;
  std::string prompt;  // rendered as a single user message
  double temperature = 0.0;
  int sample_index = 0;  // distinguishes repeated stochastic draws
  int max_tokens = 256;
};

// Per-request outcome used by batch execution: errors are positional and
// never abort the surrounding batch.
struct CompletionResult {
  bool ok = false;
  std::string text;
  std::string error;

  static CompletionResult success(std::string text) {
    return {true, std::move(text), {}};
  }
  static CompletionResult failure(std::string error) {
    return {false, {}, std::move(error)};
  }
};

class Backend {
public:
  virtual ~Backend() = default;

  // Returns the model's text for the request; throws BackendError on failure.
  virtual std::string complete(const CompletionRequest& request) = 0;

  // Number of completions actually executed by this backend (cache hits on a
  // wrapping cache do not count).
  virtual std::uint64_t calls() const = 0;

  // Runs the requests with at most max_parallel in flight. Results are
  // positionally aligned with the input; a failing request yields a failure
  // result in its slot.
  std::vector<CompletionResult> complete_batch(
      const std::vector<CompletionRequest>& requests, int max_parallel);
};

}  // namespace sac3
