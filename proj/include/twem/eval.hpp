#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "twem/corpus.hpp"

namespace twem {

struct ConfusionMatrix {
  int classes = 0;
  std::vector<long> m;  // [gold][pred]

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int c)
      : classes(c), m(static_cast<size_t>(c) * static_cast<size_t>(c), 0) {}

  long& at(int gold, int pred) {
    return m[static_cast<size_t>(gold) * classes + pred];
  }
  long at(int gold, int pred) const {
    return m[static_cast<size_t>(gold) * classes + pred];
  }
  long total() const {
    long t = 0;
    for (const long x : m) t += x;
    return t;
  }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;
};

struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  long total = 0;
};

ConfusionMatrix confusion(std::span<const int> golds,
                          std::span<const int> preds, int classes);

// P_c = M[c][c]/colsum, R_c = M[c][c]/rowsum, F1 harmonic mean; zero
// denominators give 0. Weighted F1 averages class F1 by gold support.
MetricsReport metrics(const ConfusionMatrix& cm);

// Trains on train_ids, returns predictions for test_ids (in order). The
// fold seed is derived deterministically from the run seed and fold index.
using Trainer = std::function<std::vector<int>(
    const Dataset&, const std::vector<int>& train_ids,
    const std::vector<int>& test_ids, uint64_t fold_seed)>;

struct CvResult {
  MetricsReport pooled;        // all fold predictions in one confusion matrix
  ConfusionMatrix pooled_cm;
  std::vector<MetricsReport> per_fold;
};

CvResult cross_validate(const Trainer& trainer, const Dataset& ds, int k,
                        uint64_t seed);

struct SignificanceResult {
  double observed = 0.0;  // |weighted F1 difference|
  double p_value = 1.0;     // (count + 1) / (R + 1)
  int rounds = 0;
  uint64_t seed = 0;
};

// Approximate randomization: each round swaps the two systems' predictions
// per example with probability 1/2 and counts rounds with a permuted
// difference at least as large as the observed one.
SignificanceResult ar_test(std::span<const int> preds_a,
                           std::span<const int> preds_b,
                           std::span<const int> golds, int rounds,
                           uint64_t seed);

}  // namespace twem
