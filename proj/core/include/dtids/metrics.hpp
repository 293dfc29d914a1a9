#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dtids/tensor.hpp"

namespace dtids {

/// counts[truth][predicted]
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes);

  void add(int truth, int predicted);
  /// Element-wise sum, for merging shards of an evaluation.
  void merge(const ConfusionMatrix& other);

  std::size_t classes() const noexcept { return classes_; }
  std::uint64_t count(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * classes_ + predicted];
  }
  std::uint64_t total() const;

  std::uint64_t true_positives(std::size_t c) const { return count(c, c); }
  std::uint64_t false_positives(std::size_t c) const;
  std::uint64_t false_negatives(std::size_t c) const;

  double accuracy() const;
  /// Per-class scores; a zero denominator yields 0.
  double precision(std::size_t c) const;
  double recall(std::size_t c) const;
  double f1(std::size_t c) const;
  /// Unweighted means over classes.
  double macro_precision() const;
  double macro_recall() const;
  double macro_f1() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// Probability that a random positive (label 1) outscores a random negative
/// (label 0), ties counting one half. Throws UndefinedStatisticError unless
/// both labels occur.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// One-vs-rest macro ROC AUC over the columns of probs [N, C]. For C = 2 this
/// equals roc_auc on column 1. Classes absent from labels are skipped; fewer
/// than two present classes throws UndefinedStatisticError.
double roc_auc_ovr(const Tensor& probs, std::span<const int> labels);

/// Row-wise argmax; the lowest index wins ties.
std::vector<int> argmax_rows(const Tensor& probs);

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;  // macro
  double recall = 0.0;     // macro
  double f1 = 0.0;         // macro
  double roc_auc = 0.0;
  ConfusionMatrix confusion;
  std::size_t params = 0;
  double training_seconds = 0.0;
  double testing_seconds = 0.0;
};

/// Metrics from class probabilities [N, C] and true labels. Timing fields and
/// params are left for the caller.
MetricsReport compute_metrics(const Tensor& probs, std::span<const int> labels);

}  // namespace dtids
