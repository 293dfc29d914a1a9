#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dtids/dataset.hpp"
#include "dtids/optimizer.hpp"
#include "dtids/training.hpp"
#include "dtids/transfer.hpp"

namespace dtids {

/// Min-max scaling of one series onto [0, 1]; a constant series maps to 0.
std::vector<double> minmax_series(std::vector<double> values);

/// Settings of a transferred-versus-from-scratch comparison.
struct TransferExperimentConfig {
  std::vector<std::string> channels;  // one per branch
  std::size_t window = 10;
  std::size_t source_stride = 20;
  std::size_t target_stride = 1;
  int source_epochs = 5;
  int target_epochs = 15;  // both arms get the same budget
  std::size_t batch_size = 64;
  OptimizerKind optimizer = OptimizerKind::adam;
  FreezePolicy policy = FreezePolicy::fine_tune_all;
  std::uint64_t seed = 1;

  void validate() const;
};

struct TransferOutcome {
  std::uint64_t seed = 0;
  History source;
  History transferred;
  History scratch;
  Network single;
  Network transferred_net;
  Network scratch_net;

  double transferred_accuracy() const { return transferred.epochs.empty() ? 0.0 : transferred.epochs.back().val_accuracy; }
  double scratch_accuracy() const { return scratch.epochs.empty() ? 0.0 : scratch.epochs.back().val_accuracy; }
};

/// Pre-trains a single-channel network on every channel of the source data,
/// transfers it into a multi-channel network and fine-tunes on 80% of the
/// target windows; a second multi-channel network with the same
/// initialisation trains from scratch on the same windows. Validation
/// accuracy is measured on the remaining 20%. Early stopping is off so both
/// arms see the same number of epochs. Each channel is min-max scaled per
/// series.
TransferOutcome run_transfer_experiment(const TabularDataset& source, const TabularDataset& target,
                                        const TransferExperimentConfig& cfg);

}  // namespace dtids
