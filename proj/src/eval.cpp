#include "sac3/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sac3/scoring.hpp"

namespace sac3 {

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw ScoringError("auroc: scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (int label : labels) {
    if (label != 0 && label != 1) throw ScoringError("auroc: labels must be 0/1");
    positives += static_cast<std::size_t>(label);
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw ScoringError("auroc: need both classes present");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midranks for tied scores, then the rank-sum statistic of the positives.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) positive_rank_sum += midrank;
    }
    i = j;
  }

  const double n1 = static_cast<double>(positives);
  const double n0 = static_cast<double>(negatives);
  const double u = positive_rank_sum - n1 * (n1 + 1.0) / 2.0;
  return u / (n1 * n0);
}

double accuracy_at_threshold(const std::vector<double>& scores,
                             const std::vector<int>& labels, double threshold) {
  if (scores.size() != labels.size()) {
    throw ScoringError("accuracy: scores and labels differ in length");
  }
  if (scores.empty()) throw ScoringError("accuracy: empty input");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool flagged = scores[i] >= threshold;
    if (flagged == (labels[i] == 1)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

std::vector<ThresholdRow> threshold_sweep(const std::vector<double>& scores,
                                          const std::vector<int>& labels,
                                          const std::vector<double>& grid) {
  if (grid.empty()) throw ScoringError("threshold sweep: empty grid");
  std::vector<ThresholdRow> rows;
  rows.reserve(grid.size());
  for (double t : grid) {
    rows.push_back({t, accuracy_at_threshold(scores, labels, t)});
  }
  return rows;
}

std::vector<LambdaRow> lambda_sweep(const std::vector<ComponentTriple>& triples,
                                    const std::vector<int>& labels,
                                    const std::vector<double>& lambdas) {
  if (triples.size() != labels.size()) {
    throw ScoringError("lambda sweep: triples and labels differ in length");
  }
  std::vector<LambdaRow> rows;
  rows.reserve(lambdas.size());
  for (double lambda : lambdas) {
    std::vector<double> combined;
    std::vector<int> kept_labels;
    combined.reserve(triples.size());
    for (std::size_t i = 0; i < triples.size(); ++i) {
      const ComponentTriple& t = triples[i];
      if (!t.z_q && !t.z_m && !t.z_qm) continue;
      combined.push_back(score_all(t.z_q, t.z_m, t.z_qm, lambda).normalized);
      kept_labels.push_back(labels[i]);
    }
    rows.push_back({lambda, auroc(combined, kept_labels)});
  }
  return rows;
}

std::vector<KRow> k_sweep(const std::vector<VerdictRows>& examples,
                          const std::vector<int>& labels,
                          const std::vector<int>& ks) {
  if (examples.size() != labels.size()) {
    throw ScoringError("k sweep: examples and labels differ in length");
  }
  std::size_t max_rows = 0;
  for (const VerdictRows& rows : examples) max_rows = std::max(max_rows, rows.size());

  std::vector<KRow> out;
  out.reserve(ks.size());
  for (int k : ks) {
    if (k < 1 || static_cast<std::size_t>(k) > max_rows) {
      throw ScoringError("k sweep: k=" + std::to_string(k) +
                         " exceeds available perturbations");
    }
    std::vector<double> prefix_scores;
    std::vector<int> kept_labels;
    double score_sum = 0.0;
    for (std::size_t e = 0; e < examples.size(); ++e) {
      double total = 0.0;
      std::size_t cells = 0;
      const std::size_t limit =
          std::min<std::size_t>(static_cast<std::size_t>(k), examples[e].size());
      for (std::size_t row = 0; row < limit; ++row) {
        for (double v : examples[e][row]) {
          total += v;
          ++cells;
        }
      }
      if (cells == 0) continue;
      const double score = total / static_cast<double>(cells);
      prefix_scores.push_back(score);
      kept_labels.push_back(labels[e]);
      score_sum += score;
    }
    if (prefix_scores.empty()) {
      throw ScoringError("k sweep: no example has usable cells for k=" + std::to_string(k));
    }
    KRow row;
    row.k = k;
    row.auroc = auroc(prefix_scores, kept_labels);
    row.mean_score = score_sum / static_cast<double>(prefix_scores.size());
    out.push_back(row);
  }
  return out;
}

std::vector<std::size_t> histogram(const std::vector<double>& scores,
                                   std::size_t bins, double lo, double hi) {
  if (bins < 1) throw ScoringError("histogram: need at least one bin");
  if (!(hi > lo)) throw ScoringError("histogram: hi must exceed lo");
  std::vector<std::size_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double s : scores) {
    double offset = (s - lo) / width;
    long long bin = static_cast<long long>(std::floor(offset));
    if (bin < 0) bin = 0;
    if (bin >= static_cast<long long>(bins)) bin = static_cast<long long>(bins) - 1;
    ++counts[static_cast<std::size_t>(bin)];
  }
  return counts;
}

}  // namespace sac3
