#pragma once

// Independent reference implementations used to check library results.
// They favour the most literal reading of each definition over speed.

#include <cmath>
#include <cstddef>
#include <vector>

namespace dtids::testing {

struct CountingMetrics {
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// Macro metrics by counting raw (truth, prediction) pairs class by class.
inline CountingMetrics counting_metrics(const std::vector<int>& truth, const std::vector<int>& pred, int classes) {
  CountingMetrics m;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == pred[i];
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (int c = 0; c < classes; ++c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (pred[i] == c && truth[i] == c) ++tp;
      if (pred[i] == c && truth[i] != c) ++fp;
      if (pred[i] != c && truth[i] == c) ++fn;
    }
    const double p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double r = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.precision += p;
    m.recall += r;
    m.f1 += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  m.precision /= classes;
  m.recall /= classes;
  m.f1 /= classes;
  return m;
}

/// ROC AUC by enumerating every (positive, negative) pair; ties count 1/2.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double concordant = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) concordant += 1.0;
      else if (scores[i] == scores[j]) concordant += 0.5;
    }
  }
  return concordant / static_cast<double>(pairs);
}

/// Logistic regression by full-batch gradient descent on features in [0, 1];
/// returns training accuracy. Used as the separability gate of synthetic data.
inline double logistic_regression_accuracy(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                                           int iterations = 2000, double rate = 0.5) {
  const std::size_t n = rows.size(), d = rows.front().size();
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> gw(d, 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = b;
      for (std::size_t k = 0; k < d; ++k) z += w[k] * rows[i][k];
      const double err = 1.0 / (1.0 + std::exp(-z)) - labels[i];
      for (std::size_t k = 0; k < d; ++k) gw[k] += err * rows[i][k];
      gb += err;
    }
    for (std::size_t k = 0; k < d; ++k) w[k] -= rate * gw[k] / static_cast<double>(n);
    b -= rate * gb / static_cast<double>(n);
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = b;
    for (std::size_t k = 0; k < d; ++k) z += w[k] * rows[i][k];
    correct += (z > 0.0 ? 1 : 0) == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace dtids::testing
