#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "dtids/domain.hpp"
#include "dtids/network.hpp"
#include "dtids/training.hpp"

namespace dtids {

struct SegmentationConfig {
  std::size_t window = 10;
  std::size_t stride = 1;

  /// Throws ConfigError unless window >= 8 and stride >= 1.
  void validate() const;
};

/// Start offsets of the sliding windows: 0, stride, 2*stride, ... while the
/// window fits; the trailing remainder is dropped.
std::vector<std::size_t> segment_offsets(std::size_t total, const SegmentationConfig& cfg);

/// Sliding-window segments of a single-channel series, each a Tensor[L].
/// Throws EmptyDomainError when the series is shorter than one window.
std::vector<Tensor> segment(std::span<const double> series, const SegmentationConfig& cfg);

/// Majority label of a window (normal = 1, attack = 0); ties go to attack.
int window_label(std::span<const int> labels);

/// One channel with a label per sample.
struct LabeledSeries {
  std::vector<double> values;
  std::vector<int> labels;
};

/// Several aligned channels sharing one label per sample.
struct MultiChannelSeries {
  std::vector<std::vector<double>> channels;
  std::vector<int> labels;
};

/// Union of the windows of every single-channel dataset, labelled by
/// majority vote, binary classes, provenance = dataset index.
Domain build_source_domain(std::span<const LabeledSeries> datasets, const SegmentationConfig& cfg);

/// Windows over all channels jointly: X is [S, channels, L].
Domain build_target_domain(const MultiChannelSeries& series, const SegmentationConfig& cfg);

enum class FreezePolicy {
  frozen,         // nothing in the multi-channel network is updated
  fine_tune_all,  // every layer is updated
  head_only,      // transferred branches stay fixed; input norm and head train
};

std::string_view to_string(FreezePolicy policy);
/// Accepts frozen, all (fine-tune-all) and head (fine-tune-head-only).
FreezePolicy parse_freeze_policy(std::string_view name);

struct LayerMapping {
  std::size_t source_block;  // hidden layer j of the single-channel network (0-based)
  std::size_t branch;        // branch k of the multi-channel network (0-based)
  std::size_t branch_block;  // hidden layer of branch k receiving the copy
};

struct TransferPlan {
  std::vector<LayerMapping> mappings;
  FreezePolicy policy = FreezePolicy::fine_tune_all;

  /// Layer j of the single network to layer j of every branch.
  static TransferPlan one_to_one(std::size_t hidden_layers, std::size_t branches,
                                 FreezePolicy policy = FreezePolicy::fine_tune_all);
  /// Throws TransferError unless every branch layer is covered exactly once.
  void validate(std::size_t hidden_layers, std::size_t branches) const;
};

/// Pre-trains a single-channel network on the source domain. A stratified
/// 80/20 split of the source (seeded by cfg.seed) provides validation data.
History train_source(Network& single, const Domain& source, const TrainConfig& cfg);

/// Copies every parameter (weights, biases, batch-norm state) of the single
/// network's hidden layers into the mapped branch layers of the multi-channel
/// network. Head layers are not touched. Throws TransferError on shape
/// mismatch.
void transfer_weights(Network& single, Network& multi, const TransferPlan& plan);

/// Applies the plan's freeze policy and trains the multi-channel network on
/// the target data. Frozen layers remain bitwise unchanged.
History fine_tune(Network& multi, const Domain& target_train, const Domain& target_val,
                  const TransferPlan& plan, const TrainConfig& cfg);

/// Squared distance between the mean feature vectors of two sets of
/// features [n, d] and [m, d].
double mmd(const Tensor& source_features, const Tensor& target_features);
/// mmd with the identity feature map on flattened segments.
double mmd(const Domain& source, const Domain& target);
/// mmd with the network's pooled (GAP) features as the feature map.
double mmd(const Domain& source, const Domain& target, Network& feature_net);

/// Pooled features of a batch: the output of the GAP layer (or the
/// concatenated branch features of a multi-channel network), inference mode.
Tensor pooled_features(Network& net, const Tensor& batch);

}  // namespace dtids
