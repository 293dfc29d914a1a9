#include "dtids/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dtids/error.hpp"

namespace dtids {

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {}

void ConfusionMatrix::add(int truth, int predicted) {
  if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= classes_ ||
      static_cast<std::size_t>(predicted) >= classes_) {
    throw EvalError("confusion matrix: class index out of range");
  }
  ++counts_[static_cast<std::size_t>(truth) * classes_ + static_cast<std::size_t>(predicted)];
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw EvalError("cannot merge confusion matrices of different size");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::false_positives(std::size_t c) const {
  std::uint64_t n = 0;
  for (std::size_t t = 0; t < classes_; ++t) {
    if (t != c) n += count(t, c);
  }
  return n;
}

std::uint64_t ConfusionMatrix::false_negatives(std::size_t c) const {
  std::uint64_t n = 0;
  for (std::size_t p = 0; p < classes_; ++p) {
    if (p != c) n += count(c, p);
  }
  return n;
}

double ConfusionMatrix::accuracy() const {
  const auto n = total();
  if (n == 0) return 0.0;
  std::uint64_t hits = 0;
  for (std::size_t c = 0; c < classes_; ++c) hits += count(c, c);
  return static_cast<double>(hits) / static_cast<double>(n);
}

double ConfusionMatrix::precision(std::size_t c) const {
  const auto denom = true_positives(c) + false_positives(c);
  return denom == 0 ? 0.0 : static_cast<double>(true_positives(c)) / static_cast<double>(denom);
}

double ConfusionMatrix::recall(std::size_t c) const {
  const auto denom = true_positives(c) + false_negatives(c);
  return denom == 0 ? 0.0 : static_cast<double>(true_positives(c)) / static_cast<double>(denom);
}

double ConfusionMatrix::f1(std::size_t c) const {
  const double p = precision(c), r = recall(c);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double ConfusionMatrix::macro_precision() const {
  double s = 0.0;
  for (std::size_t c = 0; c < classes_; ++c) s += precision(c);
  return s / static_cast<double>(classes_);
}

double ConfusionMatrix::macro_recall() const {
  double s = 0.0;
  for (std::size_t c = 0; c < classes_; ++c) s += recall(c);
  return s / static_cast<double>(classes_);
}

double ConfusionMatrix::macro_f1() const {
  double s = 0.0;
  for (std::size_t c = 0; c < classes_; ++c) s += f1(c);
  return s / static_cast<double>(classes_);
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw EvalError("roc_auc: score/label count mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney U: sum of mid-ranks of the positives.
  double positive_rank_sum = 0.0;
  std::uint64_t positives = 0, negatives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += mid_rank;
        ++positives;
      } else {
        ++negatives;
      }
    }
    i = j;
  }
  if (positives == 0 || negatives == 0) {
    throw UndefinedStatisticError("roc_auc: both classes must be present");
  }
  const double np = static_cast<double>(positives), nn = static_cast<double>(negatives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double roc_auc_ovr(const Tensor& probs, std::span<const int> labels) {
  expect_rank(probs, 2, "roc_auc_ovr probs");
  const std::size_t n = probs.dim(0), classes = probs.dim(1);
  if (labels.size() != n) throw EvalError("roc_auc_ovr: score/label count mismatch");
  if (classes == 2) {
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = probs.at(i, 1);
    return roc_auc(scores, labels);
  }
  double total = 0.0;
  std::size_t used = 0;
  std::vector<double> scores(n);
  std::vector<int> binary(n);
  for (std::size_t c = 0; c < classes; ++c) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = probs.at(i, c);
      binary[i] = labels[i] == static_cast<int>(c) ? 1 : 0;
      pos += static_cast<std::size_t>(binary[i]);
    }
    if (pos == 0 || pos == n) continue;
    total += roc_auc(scores, binary);
    ++used;
  }
  if (used == 0) throw UndefinedStatisticError("roc_auc: fewer than two classes present");
  return total / static_cast<double>(used);
}

std::vector<int> argmax_rows(const Tensor& probs) {
  expect_rank(probs, 2, "argmax probs");
  const std::size_t n = probs.dim(0), classes = probs.dim(1);
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = probs.raw() + i * classes;
    out[i] = static_cast<int>(std::max_element(row, row + classes) - row);
  }
  return out;
}

MetricsReport compute_metrics(const Tensor& probs, std::span<const int> labels) {
  expect_rank(probs, 2, "metrics probs");
  if (probs.dim(0) == 0 || labels.empty()) throw EvalError("cannot evaluate an empty test set");
  if (labels.size() != probs.dim(0)) throw EvalError("metrics: prediction/label count mismatch");
  MetricsReport r;
  r.confusion = ConfusionMatrix(probs.dim(1));
  const auto predicted = argmax_rows(probs);
  for (std::size_t i = 0; i < labels.size(); ++i) r.confusion.add(labels[i], predicted[i]);
  r.accuracy = r.confusion.accuracy();
  r.precision = r.confusion.macro_precision();
  r.recall = r.confusion.macro_recall();
  r.f1 = r.confusion.macro_f1();
  try {
    r.roc_auc = roc_auc_ovr(probs, labels);
  } catch (const UndefinedStatisticError&) {
    // Single-class test sets have no ROC curve; report chance level.
    r.roc_auc = 0.5;
  }
  return r;
}

}  // namespace dtids
