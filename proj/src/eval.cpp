#include "twem/eval.hpp"

#include <algorithm>
#include <cmath>

#include "twem/errors.hpp"
#include "twem/rng.hpp"

namespace twem {

ConfusionMatrix confusion(std::span<const int> golds,
                          std::span<const int> preds, int classes) {
  if (golds.size() != preds.size()) {
    throw DataError("confusion: " + std::to_string(golds.size()) +
                    " golds vs " + std::to_string(preds.size()) + " preds");
  }
  ConfusionMatrix cm(classes);
  for (size_t i = 0; i < golds.size(); ++i) {
    const int g = golds[i];
    const int p = preds[i];
    if (g < 0 || g >= classes || p < 0 || p >= classes) {
      throw DataError("confusion: label out of range at position " +
                      std::to_string(i));
    }
    ++cm.at(g, p);
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  const long total = cm.total();
  if (total == 0) throw DataError("metrics: empty confusion matrix");
  MetricsReport report;
  report.total = total;
  report.per_class.resize(static_cast<size_t>(cm.classes));
  long correct = 0;
  double weighted = 0.0;
  for (int c = 0; c < cm.classes; ++c) {
    long colsum = 0, rowsum = 0;
    for (int i = 0; i < cm.classes; ++i) {
      colsum += cm.at(i, c);
      rowsum += cm.at(c, i);
    }
    const long tp = cm.at(c, c);
    correct += tp;
    ClassMetrics& cls = report.per_class[static_cast<size_t>(c)];
    cls.support = rowsum;
    cls.precision = colsum > 0 ? static_cast<double>(tp) / colsum : 0.0;
    cls.recall = rowsum > 0 ? static_cast<double>(tp) / rowsum : 0.0;
    cls.f1 = (cls.precision + cls.recall) > 0.0
                 ? 2.0 * cls.precision * cls.recall /
                       (cls.precision + cls.recall)
                 : 0.0;
    weighted += cls.f1 * static_cast<double>(rowsum);
  }
  report.weighted_f1 = weighted / static_cast<double>(total);
  report.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  return report;
}

CvResult cross_validate(const Trainer& trainer, const Dataset& ds, int k,
                        uint64_t seed) {
  const std::vector<FoldSplit> folds = stratified_folds(ds, k, seed);
  CvResult result;
  result.pooled_cm = ConfusionMatrix(ds.classes());
  for (const FoldSplit& fold : folds) {
    const uint64_t fold_seed =
        derive_seed(seed, "fold") + static_cast<uint64_t>(fold.fold_index);
    std::vector<int> preds;
    try {
      preds = trainer(ds, fold.train_ids, fold.test_ids, fold_seed);
    } catch (const Error& e) {
      throw NumericError("cross_validate: fold " +
                         std::to_string(fold.fold_index) +
                         " failed: " + e.what());
    }
    if (preds.size() != fold.test_ids.size()) {
      throw NumericError("cross_validate: fold " +
                         std::to_string(fold.fold_index) + " returned " +
                         std::to_string(preds.size()) + " predictions for " +
                         std::to_string(fold.test_ids.size()) + " examples");
    }
    std::vector<int> golds;
    golds.reserve(fold.test_ids.size());
    for (const int id : fold.test_ids) {
      golds.push_back(ds.examples[static_cast<size_t>(id)].label);
    }
    const ConfusionMatrix fold_cm = confusion(golds, preds, ds.classes());
    result.per_fold.push_back(metrics(fold_cm));
    for (size_t i = 0; i < fold_cm.m.size(); ++i) {
      result.pooled_cm.m[i] += fold_cm.m[i];
    }
  }
  result.pooled = metrics(result.pooled_cm);
  return result;
}

namespace {

double weighted_f1_of(std::span<const int> preds, std::span<const int> golds,
                      int classes) {
  return metrics(confusion(golds, preds, classes)).weighted_f1;
}

}  // namespace

SignificanceResult ar_test(std::span<const int> preds_a,
                           std::span<const int> preds_b,
                           std::span<const int> golds, int rounds,
                           uint64_t seed) {
  if (preds_a.size() != golds.size() || preds_b.size() != golds.size()) {
    throw DataError("ar_test: prediction/gold length mismatch");
  }
  if (golds.empty()) throw DataError("ar_test: no examples");
  if (rounds < 1) throw UsageError("ar_test: rounds must be >= 1");

  int classes = 0;
  for (size_t i = 0; i < golds.size(); ++i) {
    classes = std::max({classes, golds[i] + 1, preds_a[i] + 1, preds_b[i] + 1});
  }
  classes = std::max(classes, 2);

  const double observed =
      std::abs(weighted_f1_of(preds_a, golds, classes) -
               weighted_f1_of(preds_b, golds, classes));

  Rng rng(derive_seed(seed, "ar_test"));
  std::vector<int> pa(preds_a.begin(), preds_a.end());
  std::vector<int> pb(preds_b.begin(), preds_b.end());
  long count = 0;
  for (int r = 0; r < rounds; ++r) {
    for (size_t i = 0; i < pa.size(); ++i) {
      pa[i] = preds_a[i];
      pb[i] = preds_b[i];
      if ((rng.next() & 1ULL) != 0) std::swap(pa[i], pb[i]);
    }
    const double diff = std::abs(weighted_f1_of(pa, golds, classes) -
                                 weighted_f1_of(pb, golds, classes));
    if (diff >= observed) ++count;
  }

  SignificanceResult result;
  result.observed = observed;
  result.rounds = rounds;
  result.seed = seed;
  result.p_value =
      static_cast<double>(count + 1) / static_cast<double>(rounds + 1);
  return result;
}

}  // namespace twem
