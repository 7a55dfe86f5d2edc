#include <doctest.h>

#include <cmath>
#include <vector>

#include "twem/errors.hpp"
#include "twem/eval.hpp"
#include "twem/rng.hpp"

using namespace twem;

namespace {

// Independent per-class metric computation used as the oracle.
double oracle_weighted_f1(const ConfusionMatrix& cm) {
  double weighted = 0.0;
  long total = 0;
  for (int c = 0; c < cm.classes; ++c) {
    long tp = cm.at(c, c), row = 0, col = 0;
    for (int i = 0; i < cm.classes; ++i) {
      row += cm.at(c, i);
      col += cm.at(i, c);
    }
    const double p = col > 0 ? static_cast<double>(tp) / col : 0.0;
    const double r = row > 0 ? static_cast<double>(tp) / row : 0.0;
    const double f1 = (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
    weighted += f1 * static_cast<double>(row);
    total += row;
  }
  return weighted / static_cast<double>(total);
}

Dataset two_class_dataset(int majority, int minority) {
  Dataset ds;
  ds.name = "synthetic";
  ds.label_names = {"major", "minor"};
  int id = 0;
  for (int i = 0; i < majority; ++i) {
    ds.examples.push_back({id, "m" + std::to_string(id), 0});
    ++id;
  }
  for (int i = 0; i < minority; ++i) {
    ds.examples.push_back({id, "n" + std::to_string(id), 1});
    ++id;
  }
  return ds;
}

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("confusion matrix tallies") {
  SUBCASE("perfect predictions are diagonal") {
    const std::vector<int> golds = {0, 1, 2, 1, 0};
    const ConfusionMatrix cm = confusion(golds, golds, 3);
    for (int g = 0; g < 3; ++g) {
      for (int p = 0; p < 3; ++p) {
        if (g != p) CHECK(cm.at(g, p) == 0);
      }
    }
    CHECK(cm.total() == 5);
  }
  SUBCASE("constant predictions fill one column") {
    const std::vector<int> golds = {0, 1, 2};
    const std::vector<int> preds = {0, 0, 0};
    const ConfusionMatrix cm = confusion(golds, preds, 3);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.at(1, 0) == 1);
    CHECK(cm.at(2, 0) == 1);
    CHECK(cm.at(1, 1) == 0);
  }
  SUBCASE("hand tally") {
    const std::vector<int> golds = {0, 0, 1, 1, 2};
    const std::vector<int> preds = {0, 1, 1, 1, 2};
    const ConfusionMatrix cm = confusion(golds, preds, 3);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.at(0, 1) == 1);
    CHECK(cm.at(1, 1) == 2);
    CHECK(cm.at(2, 2) == 1);
  }
  SUBCASE("length mismatch is an error") {
    const std::vector<int> golds = {0, 1};
    const std::vector<int> preds = {0};
    CHECK_THROWS_AS(confusion(golds, preds, 2), DataError);
  }
}

TEST_CASE("metrics on hand cases") {
  SUBCASE("diagonal matrix is perfect") {
    ConfusionMatrix cm(3);
    cm.at(0, 0) = 5;
    cm.at(1, 1) = 3;
    cm.at(2, 2) = 2;
    const MetricsReport report = metrics(cm);
    for (const ClassMetrics& c : report.per_class) {
      CHECK(c.precision == 1.0);
      CHECK(c.recall == 1.0);
      CHECK(c.f1 == 1.0);
    }
    CHECK(report.weighted_f1 == 1.0);
    CHECK(report.accuracy == 1.0);
  }
  SUBCASE("five-example hand case") {
    const std::vector<int> golds = {0, 0, 1, 1, 2};
    const std::vector<int> preds = {0, 1, 1, 1, 2};
    const MetricsReport report = metrics(confusion(golds, preds, 3));
    CHECK(report.per_class[0].precision == doctest::Approx(1.0));
    CHECK(report.per_class[0].recall == doctest::Approx(0.5));
    CHECK(report.per_class[1].precision == doctest::Approx(2.0 / 3.0));
    CHECK(report.per_class[1].recall == doctest::Approx(1.0));
    CHECK(report.per_class[1].f1 == doctest::Approx(0.8));
    CHECK(report.per_class[2].f1 == doctest::Approx(1.0));
    // weighted F1 = (2*(2/3) + 2*0.8 + 1*1)/5, hand-computed
    CHECK(report.weighted_f1 == doctest::Approx(0.7866666667).epsilon(1e-9));
  }
  SUBCASE("zero denominators give zero by convention") {
    ConfusionMatrix cm(3);
    cm.at(0, 0) = 4;
    cm.at(1, 0) = 2;  // class 1 never predicted correctly, class 2 absent
    const MetricsReport report = metrics(cm);
    CHECK(report.per_class[1].precision == 0.0);
    CHECK(report.per_class[1].recall == 0.0);
    CHECK(report.per_class[1].f1 == 0.0);
    CHECK(report.per_class[2].precision == 0.0);
    CHECK(report.per_class[2].recall == 0.0);
  }
  SUBCASE("harmonic mean is consistent with the reference table row") {
    // published per-class row: P 0.79, R 0.74 -> F1 rounds to 0.76
    const double f1 = 2.0 * 0.79 * 0.74 / (0.79 + 0.74);
    CHECK(std::round(f1 * 100.0) / 100.0 == doctest::Approx(0.76));
  }
}

TEST_CASE("metrics agree with the brute-force oracle on random matrices") {
  Rng rng(61);
  for (int trial = 0; trial < 1000; ++trial) {
    const int classes = 2 + static_cast<int>(rng.below(4));
    ConfusionMatrix cm(classes);
    bool any = false;
    for (int g = 0; g < classes; ++g) {
      for (int p = 0; p < classes; ++p) {
        cm.at(g, p) = static_cast<long>(rng.below(9));
        any = any || cm.at(g, p) > 0;
      }
    }
    if (!any) cm.at(0, 0) = 1;
    const MetricsReport report = metrics(cm);
    CHECK(std::abs(report.weighted_f1 - oracle_weighted_f1(cm)) < 1e-12);
  }
}

TEST_CASE("cross validation pools predictions") {
  SUBCASE("constant-majority trainer on an 80/20 split") {
    const Dataset ds = two_class_dataset(80, 20);
    const Trainer constant = [](const Dataset&, const std::vector<int>&,
                                const std::vector<int>& test_ids, uint64_t) {
      return std::vector<int>(test_ids.size(), 0);
    };
    const CvResult result = cross_validate(constant, ds, 10, 3);
    CHECK(result.pooled_cm.total() == 100);
    CHECK(result.pooled.accuracy == doctest::Approx(0.8));
    // weighted F1 = 0.8 * F1_major; F1_major = 2*0.8/1.8
    CHECK(result.pooled.weighted_f1 ==
          doctest::Approx(0.8 * (2.0 * 0.8 / 1.8)).epsilon(1e-12));
    CHECK(result.per_fold.size() == 10);
  }
  SUBCASE("gold-echo trainer is perfect") {
    const Dataset ds = two_class_dataset(30, 30);
    const Trainer echo = [](const Dataset& data, const std::vector<int>&,
                            const std::vector<int>& test_ids, uint64_t) {
      std::vector<int> preds;
      for (const int id : test_ids) {
        preds.push_back(data.examples[static_cast<size_t>(id)].label);
      }
      return preds;
    };
    const CvResult result = cross_validate(echo, ds, 5, 4);
    CHECK(result.pooled.weighted_f1 == doctest::Approx(1.0));
  }
  SUBCASE("leave-one-out pools one prediction per example") {
    Dataset ds;
    ds.name = "loo";
    ds.label_names = {"only"};
    for (int i = 0; i < 12; ++i) {
      ds.examples.push_back({i, "t" + std::to_string(i), 0});
    }
    const Trainer constant = [](const Dataset&, const std::vector<int>&,
                                const std::vector<int>& test_ids, uint64_t) {
      return std::vector<int>(test_ids.size(), 0);
    };
    const CvResult result = cross_validate(constant, ds, 12, 5);
    CHECK(result.pooled_cm.total() == 12);
  }
  SUBCASE("a failing fold aborts with the fold index") {
    const Dataset ds = two_class_dataset(10, 10);
    const Trainer broken = [](const Dataset&, const std::vector<int>&,
                              const std::vector<int>&,
                              uint64_t) -> std::vector<int> {
      throw NumericError("synthetic failure");
    };
    try {
      cross_validate(broken, ds, 2, 6);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("fold 0") != std::string::npos);
    }
  }
}

TEST_CASE("ar test fundamentals") {
  SUBCASE("identical systems give p = 1 for any seed and R") {
    const std::vector<int> golds = {0, 1, 0, 1, 1, 0};
    const std::vector<int> preds = {0, 1, 1, 1, 0, 0};
    for (const int rounds : {1, 10, 500}) {
      for (const uint64_t seed : {1ull, 9ull, 77ull}) {
        const SignificanceResult r =
            ar_test(preds, preds, golds, rounds, seed);
        CHECK(r.observed == 0.0);
        CHECK(r.p_value == 1.0);
      }
    }
  }
  SUBCASE("R=1 yields p in {1/2, 1}") {
    const std::vector<int> golds = {0, 0, 1, 1};
    const std::vector<int> a = {0, 0, 1, 1};
    const std::vector<int> b = {1, 1, 0, 0};
    bool saw_half = false, saw_one = false;
    for (uint64_t seed = 0; seed < 40; ++seed) {
      const SignificanceResult r = ar_test(a, b, golds, 1, seed);
      if (r.p_value == doctest::Approx(0.5)) saw_half = true;
      if (r.p_value == doctest::Approx(1.0)) saw_one = true;
      CHECK((r.p_value == doctest::Approx(0.5) ||
             r.p_value == doctest::Approx(1.0)));
    }
    CHECK(saw_half);
    CHECK(saw_one);
  }
  SUBCASE("perfect vs inverted on 40 balanced examples is significant") {
    std::vector<int> golds, perfect, inverted;
    for (int i = 0; i < 40; ++i) {
      golds.push_back(i % 2);
      perfect.push_back(i % 2);
      inverted.push_back(1 - i % 2);
    }
    const SignificanceResult r = ar_test(perfect, inverted, golds, 10000, 8);
    CHECK(r.observed == doctest::Approx(1.0));
    // only an all-or-nothing swap reproduces |diff| = 1: expected count
    // ~ R * 2^-39, so p should sit at the floor 1/(R+1)
    CHECK(r.p_value < 0.001);
    CHECK(r.p_value >= 1.0 / 10001.0);
  }
  SUBCASE("p is invariant to exchanging the systems") {
    const std::vector<int> golds = {0, 1, 0, 1, 1, 0, 0, 1};
    const std::vector<int> a = {0, 1, 0, 0, 1, 0, 1, 1};
    const std::vector<int> b = {1, 1, 0, 1, 0, 0, 0, 1};
    const SignificanceResult ab = ar_test(a, b, golds, 2000, 13);
    const SignificanceResult ba = ar_test(b, a, golds, 2000, 13);
    CHECK(ab.p_value == ba.p_value);
    CHECK(ab.observed == ba.observed);
  }
  SUBCASE("input validation") {
    const std::vector<int> golds = {0, 1};
    const std::vector<int> short_preds = {0};
    const std::vector<int> ok = {0, 1};
    CHECK_THROWS_AS(ar_test(short_preds, ok, golds, 10, 1), DataError);
    CHECK_THROWS_AS(ar_test(ok, ok, golds, 0, 1), UsageError);
  }
}

TEST_SUITE_END();
