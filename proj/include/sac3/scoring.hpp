#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sac3/report.hpp"
#include "sac3/types.hpp"

namespace sac3 {

// QA-pair verdicts over perturbed questions: row j holds the checks of the
// original pair against the samples for perturbed question j. A score needs
// at least one usable cell; failed cells never enter the denominator.
struct VerdictMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<VerdictCell> cells;  // row-major, rows*cols entries

  VerdictCell& at(std::size_t r, std::size_t c) { return cells[r * cols + c]; }
  const VerdictCell& at(std::size_t r, std::size_t c) const {
    return cells[r * cols + c];
  }
};

// Self-checking consistency: mean inequivalence of the original pair against
// the stochastic self-samples. 0 = fully consistent, 1 = fully inconsistent.
double score_sc2(std::span<const VerdictCell> verdicts);

// Question-level cross-checking consistency: mean over all usable cells of
// the perturbed-question matrix.
double score_q(const VerdictMatrix& matrix);

// Model-level cross-checking consistency over the verifier's samples on the
// original question. Same contract as score_sc2.
double score_m(std::span<const VerdictCell> verdicts);

// Cross-model cross-question consistency over the verifier matrix. Same
// contract as score_q.
double score_qm(const VerdictMatrix& matrix);

struct CombinedScore {
  double raw = 0.0;         // z_q + lambda * (z_m + z_qm) over present terms
  double normalized = 0.0;  // raw / (weight mass of present terms)
};

// Combines the component scores with verifier weight lambda. Absent
// components are skipped and the normalizer shrinks to the weight mass of
// the present ones, so the normalized score stays in [0, 1]. Throws
// ScoringError when every component is absent.
CombinedScore score_all(std::optional<double> z_q, std::optional<double> z_m,
                        std::optional<double> z_qm, double lambda);

// Confidence-weighted mean: sum(score_i * conf_i) / sum(conf_i) over usable
// cells. Throws ScoringError when no usable cell exists or every confidence
// is zero.
double confidence_weighted_score(std::span<const VerdictCell> verdicts);
double confidence_weighted_score(const VerdictMatrix& matrix);

// Hallucinated iff score >= threshold (a tie flags).
Verdict decide(double score, double threshold);

}  // namespace sac3
