#include <gtest/gtest.h>

#include "dtids/error.hpp"
#include "dtids/metrics.hpp"
#include "dtids/rng.hpp"
#include "oracles.hpp"

using namespace dtids;
using dtids::testing::counting_metrics;
using dtids::testing::pairwise_auc;

TEST(Metrics, BinaryConfusionExample) {
  ConfusionMatrix cm(2);
  for (int i = 0; i < 40; ++i) cm.add(1, 1);
  for (int i = 0; i < 10; ++i) cm.add(0, 1);
  for (int i = 0; i < 20; ++i) cm.add(1, 0);
  for (int i = 0; i < 30; ++i) cm.add(0, 0);
  EXPECT_DOUBLE_EQ(cm.accuracy(), 0.7);
  EXPECT_DOUBLE_EQ(cm.precision(1), 0.8);
  EXPECT_DOUBLE_EQ(cm.recall(1), 2.0 / 3.0);
  EXPECT_NEAR(cm.f1(1), 0.72727272727, 1e-10);
}

TEST(Metrics, PerfectClassifier) {
  Tensor probs({4, 2}, {0.9, 0.1, 0.2, 0.8, 0.7, 0.3, 0.4, 0.6});
  const std::vector<int> labels{0, 1, 0, 1};
  const auto r = compute_metrics(probs, labels);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.roc_auc, 1.0);
}

TEST(Metrics, RocExamples) {
  EXPECT_EQ(roc_auc(std::vector<double>{0.9, 0.8, 0.4, 0.3}, std::vector<int>{1, 0, 1, 0}), 0.75);
  EXPECT_EQ(roc_auc(std::vector<double>{0.5, 0.5, 0.5}, std::vector<int>{1, 0, 1}), 0.5);
  EXPECT_EQ(roc_auc(std::vector<double>{0.1, 0.9}, std::vector<int>{0, 1}), 1.0);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.9}, std::vector<int>{1, 1}), UndefinedStatisticError);
}

TEST(Metrics, RocMatchesPairwiseEnumeration) {
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const std::size_t n = 2 + rng.below(999);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = std::round(rng.uniform() * 20.0) / 20.0;  // plenty of ties
      labels[i] = static_cast<int>(rng.below(2));
    }
    labels[0] = 0;
    labels[1] = 1;
    EXPECT_NEAR(roc_auc(scores, labels), pairwise_auc(scores, labels), 1e-12);
  }
}

TEST(Metrics, ReportAgreesWithCountingOracle) {
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const int classes = 2 + static_cast<int>(rng.below(4));
    const std::size_t n = 5 + rng.below(300);
    Tensor probs({n, static_cast<std::size_t>(classes)});
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (int c = 0; c < classes; ++c) s += probs.at(i, c) = rng.uniform();
      for (int c = 0; c < classes; ++c) probs.at(i, c) /= s;
      labels[i] = static_cast<int>(i < static_cast<std::size_t>(classes) ? i : rng.below(classes));
    }
    const auto report = compute_metrics(probs, labels);
    const auto oracle = counting_metrics(labels, argmax_rows(probs), classes);
    EXPECT_EQ(report.accuracy, oracle.accuracy);
    EXPECT_EQ(report.precision, oracle.precision);
    EXPECT_EQ(report.recall, oracle.recall);
    EXPECT_EQ(report.f1, oracle.f1);
    // Everything is recomputable from the stored confusion matrix.
    EXPECT_NEAR(report.confusion.accuracy(), report.accuracy, 1e-12);
    EXPECT_NEAR(report.confusion.macro_f1(), report.f1, 1e-12);
    EXPECT_GE(report.roc_auc, 0.0);
    EXPECT_LE(report.roc_auc, 1.0);
  }
}

TEST(Metrics, OneVsRestMacroEqualsBinaryForTwoClasses) {
  Rng rng(3);
  Tensor probs({30, 2});
  std::vector<int> labels(30);
  std::vector<double> pos(30);
  for (std::size_t i = 0; i < 30; ++i) {
    probs.at(i, 1) = pos[i] = rng.uniform();
    probs.at(i, 0) = 1.0 - pos[i];
    labels[i] = static_cast<int>(i % 2);
  }
  EXPECT_NEAR(roc_auc_ovr(probs, labels), roc_auc(pos, labels), 1e-15);
}

TEST(Metrics, MergeOfShardsEqualsWhole) {
  ConfusionMatrix a(3), b(3), whole(3);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const int t = static_cast<int>(rng.below(3)), p = static_cast<int>(rng.below(3));
    (i % 2 ? a : b).add(t, p);
    whole.add(t, p);
  }
  a.merge(b);
  EXPECT_EQ(a, whole);
}

TEST(Metrics, ZeroDenominatorsGiveZero) {
  ConfusionMatrix cm(2);
  cm.add(0, 0);
  cm.add(0, 0);
  EXPECT_EQ(cm.precision(1), 0.0);
  EXPECT_EQ(cm.recall(1), 0.0);
  EXPECT_EQ(cm.f1(1), 0.0);
}
