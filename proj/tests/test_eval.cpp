#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "sac3/eval.hpp"
#include "sac3/scoring.hpp"

using namespace sac3;

namespace {

// O(n^2) oracle: fraction of (positive, negative) pairs ranked correctly,
// ties counted half.
double pair_count_auroc(const std::vector<double>& scores,
                        const std::vector<int>& labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("auroc basics") {
  CHECK(auroc({0.9, 0.1}, {1, 0}) == 1.0);
  CHECK(auroc({0.3, 0.3, 0.3, 0.3}, {1, 0, 1, 0}) == 0.5);
  CHECK(auroc({0.1, 0.9}, {1, 0}) == 0.0);
  CHECK_THROWS_AS(auroc({0.5, 0.6}, {1, 1}), ScoringError);
  CHECK_THROWS_AS(auroc({0.5}, {1, 0}), ScoringError);
}

TEST_CASE("auroc matches the pair-counting oracle on tied data") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coarse(0, 9);  // deliberate ties
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
      scores.push_back(coarse(rng) / 10.0);
      labels.push_back(coin(rng));
    }
    labels[0] = 1;
    labels[1] = 0;
    CHECK(std::abs(auroc(scores, labels) - pair_count_auroc(scores, labels)) < 1e-12);
  }
}

TEST_CASE("auroc is invariant under strictly increasing transforms") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) {
    scores.push_back(std::round(unit(rng) * 20.0) / 20.0);
    labels.push_back(i % 2);
  }
  std::vector<double> transformed;
  for (double s : scores) transformed.push_back(std::pow(s, 3) * 7.0 + 2.0);
  CHECK(auroc(scores, labels) == auroc(transformed, labels));
}

TEST_CASE("auroc complements when labels flip on tie-free scores") {
  std::vector<double> scores;
  std::vector<int> labels;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    scores.push_back(static_cast<double>(rng()) / static_cast<double>(UINT64_MAX));
    labels.push_back(i % 2);
  }
  std::vector<int> flipped;
  for (int label : labels) flipped.push_back(1 - label);
  CHECK(auroc(scores, labels) + auroc(scores, flipped) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("accuracy at a threshold") {
  CHECK(accuracy_at_threshold({1.0, 1.0}, {1, 1}, 0.5) == 1.0);
  CHECK(accuracy_at_threshold({0.0, 0.0}, {1, 1}, 0.5) == 0.0);
  CHECK(accuracy_at_threshold({0.6, 0.4}, {1, 1}, 0.5) == 0.5);
  CHECK_THROWS_AS(accuracy_at_threshold({}, {}, 0.5), ScoringError);
}

TEST_CASE("threshold sweep is non-increasing on all-positive data") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 120; ++i) {
    scores.push_back(unit(rng));
    labels.push_back(1);
  }
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  const auto rows = threshold_sweep(scores, labels, grid);
  REQUIRE(rows.size() == grid.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].accuracy <= rows[i - 1].accuracy);
  }
  CHECK(rows.front().threshold == 0.0);
  CHECK(rows.front().accuracy == 1.0);  // score >= 0 always flags
  for (const auto& row : rows) {
    CHECK(row.accuracy == accuracy_at_threshold(scores, labels, row.threshold));
  }
  CHECK_THROWS_AS(threshold_sweep(scores, labels, {}), ScoringError);
}

TEST_CASE("lambda sweep: the zero column equals the question-level auroc bitwise") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ComponentTriple> triples;
  std::vector<int> labels;
  std::vector<double> z_q_only;
  for (int i = 0; i < 150; ++i) {
    ComponentTriple t;
    t.z_q = std::round(unit(rng) * 10.0) / 10.0;
    t.z_m = unit(rng);
    t.z_qm = unit(rng);
    triples.push_back(t);
    labels.push_back(i % 2);
    z_q_only.push_back(*t.z_q);
  }
  const auto rows = lambda_sweep(triples, labels, {0.0, 0.5, 1.0, 2.0});
  CHECK(rows[0].auroc == auroc(z_q_only, labels));

  // Independent recomputation of each column.
  for (const auto& row : rows) {
    std::vector<double> combined;
    for (const auto& t : triples) {
      const double raw = *t.z_q + row.lambda * (*t.z_m + *t.z_qm);
      combined.push_back(raw / (1.0 + 2.0 * row.lambda));
    }
    CHECK(row.auroc == doctest::Approx(auroc(combined, labels)).epsilon(1e-12));
  }
}

TEST_CASE("lambda sweep is constant when the verifier terms are shared") {
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ComponentTriple> triples;
  std::vector<int> labels;
  for (int i = 0; i < 80; ++i) {
    ComponentTriple t;
    t.z_q = unit(rng);
    t.z_m = 0.25;  // identical across examples
    t.z_qm = 0.5;
    triples.push_back(t);
    labels.push_back(i % 2);
  }
  const auto rows = lambda_sweep(triples, labels, {0.0, 0.5, 1.0, 2.0});
  for (const auto& row : rows) {
    CHECK(row.auroc == doctest::Approx(rows[0].auroc).epsilon(1e-12));
  }
}

TEST_CASE("k sweep recomputes prefix scores without new queries") {
  // Two examples, three perturbation rows each; label 1 is inconsistent.
  std::vector<VerdictRows> examples = {
      {{1.0}, {1.0}, {0.0}},
      {{0.0}, {0.0}, {0.0}},
  };
  std::vector<int> labels = {1, 0};
  const auto rows = k_sweep(examples, labels, {1, 2, 3});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].k == 1);
  CHECK(rows[0].mean_score == doctest::Approx(0.5));   // (1.0 + 0.0) / 2
  CHECK(rows[2].mean_score == doctest::Approx(1.0 / 3.0));
  CHECK(rows[0].auroc == 1.0);
  CHECK(rows[2].auroc == 1.0);

  // The full prefix equals a headline question-level score.
  CHECK(rows[2].mean_score ==
        doctest::Approx((2.0 / 3.0 + 0.0) / 2.0).epsilon(1e-12));

  CHECK_THROWS_AS(k_sweep(examples, labels, {4}), ScoringError);

  const auto again = k_sweep(examples, labels, {1, 2, 3});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].auroc == rows[i].auroc);
    CHECK(again[i].mean_score == rows[i].mean_score);
  }
}

TEST_CASE("histogram counts always sum to the input size") {
  const auto zeros = histogram(std::vector<double>(10, 0.0), 10);
  CHECK(zeros[0] == 10);
  CHECK(std::accumulate(zeros.begin(), zeros.end(), std::size_t{0}) == 10);

  const auto empty = histogram({}, 5);
  CHECK(std::accumulate(empty.begin(), empty.end(), std::size_t{0}) == 0);

  const auto boundary = histogram({1.0, 0.9999, 2.5, -1.0}, 10);
  CHECK(boundary.back() == 3);   // 1.0, 0.9999 and the overflow share the last bin
  CHECK(boundary.front() == 1);  // underflow lands in the first bin
  CHECK(std::accumulate(boundary.begin(), boundary.end(), std::size_t{0}) == 4);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(-0.5, 1.5);
  std::vector<double> scores;
  for (int i = 0; i < 333; ++i) scores.push_back(unit(rng));
  const auto counts = histogram(scores, 7);
  CHECK(std::accumulate(counts.begin(), counts.end(), std::size_t{0}) == scores.size());

  CHECK_THROWS_AS(histogram({0.5}, 0), ScoringError);
}
