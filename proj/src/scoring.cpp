#include "sac3/scoring.hpp"

#include "sac3/checker.hpp"

namespace sac3 {

namespace {

double mean_over_usable(std::span<const VerdictCell> cells, const char* what) {
  double total = 0.0;
  std::size_t usable = 0;
  for (const VerdictCell& cell : cells) {
    if (!cell.usable()) continue;
    total += verdict_to_score(*cell.verdict);
    ++usable;
  }
  if (usable == 0) {
    throw ScoringError(std::string(what) + ": no usable verdicts");
  }
  return total / static_cast<double>(usable);
}

double weighted_mean_over_usable(std::span<const VerdictCell> cells, const char* what) {
  double weighted = 0.0;
  double mass = 0.0;
  std::size_t usable = 0;
  for (const VerdictCell& cell : cells) {
    if (!cell.usable()) continue;
    weighted += verdict_to_score(*cell.verdict) * cell.verdict->confidence;
    mass += cell.verdict->confidence;
    ++usable;
  }
  if (usable == 0) {
    throw ScoringError(std::string(what) + ": no usable verdicts");
  }
  if (mass <= 0.0) {
    throw ScoringError(std::string(what) + ": all confidences are zero");
  }
  return weighted / mass;
}

}  // namespace

double score_sc2(std::span<const VerdictCell> verdicts) {
  return mean_over_usable(verdicts, "z_sc2");
}

double score_q(const VerdictMatrix& matrix) {
  return mean_over_usable(matrix.cells, "z_q");
}

double score_m(std::span<const VerdictCell> verdicts) {
  return mean_over_usable(verdicts, "z_m");
}

double score_qm(const VerdictMatrix& matrix) {
  return mean_over_usable(matrix.cells, "z_qm");
}

CombinedScore score_all(std::optional<double> z_q, std::optional<double> z_m,
                        std::optional<double> z_qm, double lambda) {
  if (lambda < 0.0) throw ScoringError("lambda must be >= 0");
  if (!z_q && !z_m && !z_qm) {
    throw ScoringError("no component scores to combine");
  }
  double raw = 0.0;
  double mass = 0.0;
  if (z_q) {
    raw += *z_q;
    mass += 1.0;
  }
  if (z_m) {
    raw += lambda * *z_m;
    mass += lambda;
  }
  if (z_qm) {
    raw += lambda * *z_qm;
    mass += lambda;
  }
  CombinedScore combined;
  combined.raw = raw;
  // mass can be zero when lambda = 0 and only verifier components exist;
  // then raw is zero as well and normalization is the identity.
  combined.normalized = mass > 0.0 ? raw / mass : raw;
  return combined;
}

double confidence_weighted_score(std::span<const VerdictCell> verdicts) {
  return weighted_mean_over_usable(verdicts, "confidence-weighted score");
}

double confidence_weighted_score(const VerdictMatrix& matrix) {
  return weighted_mean_over_usable(matrix.cells, "confidence-weighted score");
}

Verdict decide(double score, double threshold) {
  return score >= threshold ? Verdict::hallucinated : Verdict::factual;
}

}  // namespace sac3
