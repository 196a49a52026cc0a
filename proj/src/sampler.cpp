#include "sac3/sampler.hpp"

#include <map>

namespace sac3 {

namespace {

CompletionRequest make_request(const std::string& model, const Question& q,
                               double temp, int sample_index, int max_tokens) {
  CompletionRequest request;
  request.model = model;
  request.prompt = q.text;
  request.temperature = temp;
  request.sample_index = sample_index;
  request.max_tokens = max_tokens;
  return request;
}

SampleCell to_cell(const CompletionResult& result, const std::string& model,
                   double temp, int sample_index) {
  SampleCell cell;
  if (result.ok) {
    cell.answer = Answer{trim(result.text), model, temp, sample_index};
  } else {
    cell.error = result.error;
  }
  return cell;
}

}  // namespace

void SampleSet::validate() const {
  if (cross_target.size() != perturbed_questions.size() && !cross_target.empty()) {
    throw ScoringError("cross_target row count does not match perturbed questions");
  }
  if (cross_verifier.size() != perturbed_questions.size() && !cross_verifier.empty()) {
    throw ScoringError("cross_verifier row count does not match perturbed questions");
  }
  const bool any = !self_target.empty() || !self_verifier.empty() ||
                   !cross_target.empty() || !cross_verifier.empty();
  if (!any) throw ScoringError("sample set is empty");
}

std::vector<SampleCell> sample_self(Backend& target, const std::string& model,
                                    const Question& x0, int n_s, double temp,
                                    int max_parallel, int max_tokens) {
  std::vector<CompletionRequest> requests;
  requests.reserve(static_cast<std::size_t>(std::max(n_s, 0)));
  for (int i = 0; i < n_s; ++i) {
    requests.push_back(make_request(model, x0, temp, i, max_tokens));
  }
  const auto results = target.complete_batch(requests, max_parallel);
  std::vector<SampleCell> cells;
  cells.reserve(results.size());
  for (int i = 0; i < static_cast<int>(results.size()); ++i) {
    cells.push_back(to_cell(results[i], model, temp, i));
  }
  return cells;
}

std::vector<SampleCell> sample_verifier(Backend& verifier, const std::string& model,
                                        const Question& x0, int n_m, double temp,
                                        int max_parallel, int max_tokens) {
  return sample_self(verifier, model, x0, n_m, temp, max_parallel, max_tokens);
}

std::vector<std::vector<SampleCell>> sample_cross(
    Backend& backend, const std::string& model,
    const std::vector<Question>& questions, int n_per_question, double temp,
    int max_parallel, int max_tokens) {
  if (n_per_question > 0 && questions.empty()) return {};

  std::vector<CompletionRequest> requests;
  requests.reserve(questions.size() * static_cast<std::size_t>(std::max(n_per_question, 0)));
  for (const Question& q : questions) {
    for (int i = 0; i < n_per_question; ++i) {
      requests.push_back(make_request(model, q, temp, i, max_tokens));
    }
  }
  const auto results = backend.complete_batch(requests, max_parallel);

  std::vector<std::vector<SampleCell>> matrix(questions.size());
  std::size_t flat = 0;
  for (std::size_t row = 0; row < questions.size(); ++row) {
    matrix[row].reserve(static_cast<std::size_t>(std::max(n_per_question, 0)));
    for (int i = 0; i < n_per_question; ++i, ++flat) {
      matrix[row].push_back(to_cell(results[flat], model, temp, i));
    }
  }
  return matrix;
}

SampleSet build_sample_set(const DetectorConfig& config, const Question& x0,
                           const std::vector<Question>& perturbed,
                           const BackendSet& backends, int max_parallel) {
  SampleSet set;
  set.perturbed_questions = perturbed;

  // Flat request plan; slots scatter results back into the four collections.
  struct Slot {
    Backend* backend = nullptr;
    CompletionRequest request;
    std::vector<SampleCell>* row = nullptr;
    std::size_t index = 0;
  };
  std::vector<Slot> plan;

  const int k = static_cast<int>(perturbed.size());
  set.self_target.resize(static_cast<std::size_t>(std::max(config.n_s, 0)));
  set.self_verifier.resize(static_cast<std::size_t>(std::max(config.n_m, 0)));
  set.cross_target.assign(static_cast<std::size_t>(k),
                          std::vector<SampleCell>(static_cast<std::size_t>(std::max(config.n_q, 0))));
  set.cross_verifier.assign(static_cast<std::size_t>(k),
                            std::vector<SampleCell>(static_cast<std::size_t>(std::max(config.n_qm, 0))));

  for (int i = 0; i < config.n_s; ++i) {
    plan.push_back({backends.target.get(),
                    make_request(config.target_model, x0, config.temp_sampling, i,
                                 config.max_tokens),
                    &set.self_target, static_cast<std::size_t>(i)});
  }
  for (int i = 0; i < config.n_m; ++i) {
    plan.push_back({backends.verifier.get(),
                    make_request(config.verifier_model, x0, config.temp_sampling, i,
                                 config.max_tokens),
                    &set.self_verifier, static_cast<std::size_t>(i)});
  }
  for (int row = 0; row < k; ++row) {
    for (int i = 0; i < config.n_q; ++i) {
      plan.push_back({backends.target.get(),
                      make_request(config.target_model, perturbed[row],
                                   config.temp_sampling, i, config.max_tokens),
                      &set.cross_target[row], static_cast<std::size_t>(i)});
    }
    for (int i = 0; i < config.n_qm; ++i) {
      plan.push_back({backends.verifier.get(),
                      make_request(config.verifier_model, perturbed[row],
                                   config.temp_sampling, i, config.max_tokens),
                      &set.cross_verifier[row], static_cast<std::size_t>(i)});
    }
  }

  // One batch per distinct backend object.
  std::map<Backend*, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    groups[plan[i].backend].push_back(i);
  }
  for (const auto& [backend, indices] : groups) {
    std::vector<CompletionRequest> requests;
    requests.reserve(indices.size());
    for (std::size_t i : indices) requests.push_back(plan[i].request);
    const auto results = backend->complete_batch(requests, max_parallel);
    for (std::size_t slot = 0; slot < indices.size(); ++slot) {
      const Slot& s = plan[indices[slot]];
      (*s.row)[s.index] = to_cell(results[slot], s.request.model,
                                  s.request.temperature, s.request.sample_index);
    }
  }

  set.validate();
  return set;
}

}  // namespace sac3
