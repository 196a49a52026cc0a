#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sac3/types.hpp"

namespace sac3 {

// Rank-based AUROC (Mann-Whitney): ties between a positive and a negative
// contribute 1/2. Requires both classes present.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

// Fraction of examples where (score >= threshold) agrees with (label == 1).
double accuracy_at_threshold(const std::vector<double>& scores,
                             const std::vector<int>& labels, double threshold);

struct ThresholdRow {
  double threshold = 0.0;
  double accuracy = 0.0;
};

std::vector<ThresholdRow> threshold_sweep(const std::vector<double>& scores,
                                          const std::vector<int>& labels,
                                          const std::vector<double>& grid);

// Stored per-example component scores; reruns of the combination formula
// never re-query a model.
struct ComponentTriple {
  std::optional<double> z_q;
  std::optional<double> z_m;
  std::optional<double> z_qm;
};

struct LambdaRow {
  double lambda = 0.0;
  double auroc = 0.0;
};

std::vector<LambdaRow> lambda_sweep(const std::vector<ComponentTriple>& triples,
                                    const std::vector<int>& labels,
                                    const std::vector<double>& lambdas);

// Per-example verdict scores of the question-level matrix, one inner vector
// per perturbed-question row (failed cells already removed).
using VerdictRows = std::vector<std::vector<double>>;

struct KRow {
  int k = 0;
  double auroc = 0.0;
  double mean_score = 0.0;
};

// Recomputes the question-level score per example from the first k rows
// only. Examples whose prefix holds no usable cell are skipped for that k.
// Throws ScoringError when some k exceeds every example's row count.
std::vector<KRow> k_sweep(const std::vector<VerdictRows>& examples,
                          const std::vector<int>& labels,
                          const std::vector<int>& ks);

// Equal-width bins over [lo, hi]; out-of-range values land in the edge bins,
// so counts always sum to scores.size().
std::vector<std::size_t> histogram(const std::vector<double>& scores,
                                   std::size_t bins, double lo = 0.0,
                                   double hi = 1.0);

}  // namespace sac3
