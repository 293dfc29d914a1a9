#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dtids/domain.hpp"
#include "dtids/metrics.hpp"
#include "dtids/network.hpp"
#include "dtids/optimizer.hpp"

namespace dtids {

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double seconds = 0.0;
};

struct History {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // epoch whose parameters were returned, 0 when none
  bool stopped_early = false;
};

struct TrainConfig {
  int epochs = 200;
  std::size_t batch_size = 64;
  OptimizerKind optimizer = OptimizerKind::adam;
  AdamParams adam;
  AdaDeltaParams adadelta;
  /// Epochs without validation-loss improvement before stopping; nullopt
  /// disables early stopping.
  std::optional<int> patience = 20;
  std::uint64_t seed = 0;
  /// Optional per-class loss weights (empty = unweighted).
  std::vector<double> class_weights;
  /// Called after every completed epoch.
  std::function<void(const EpochRecord&)> on_epoch;

  void set_learning_rate(double lr);
  /// Throws ConfigError on out-of-range values. Zero epochs is allowed and
  /// leaves the network untouched.
  void validate() const;
};

/// Mini-batch training with per-epoch seeded shuffling. With early stopping
/// enabled, training stops after `patience` epochs without a validation-loss
/// improvement and the parameters of the best epoch are restored. Throws
/// DivergedError when the loss stops being finite.
History train(Network& net, const Domain& train_set, const Domain& val_set, const TrainConfig& cfg);

/// Mean loss and accuracy of the network in inference mode.
std::pair<double, double> loss_and_accuracy(Network& net, const Domain& data,
                                            std::size_t batch_size = 256);

/// Class probabilities [N, C] in inference mode.
Tensor predict(Network& net, const Domain& data, std::size_t batch_size = 256);

/// Forward pass over the test set with argmax predictions; testing_seconds
/// covers the forward pass only. Throws EvalError on an empty set.
MetricsReport evaluate(Network& net, const Domain& test_set);

std::size_t count_params(const Network& net);

template <typename F>
auto time_block(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  auto result = std::forward<F>(f)();
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return std::make_pair(std::move(result), elapsed.count());
}

}  // namespace dtids
