#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dtids/layers.hpp"
#include "dtids/tensor.hpp"

namespace dtids {

enum class ModelKind { presnet, single_channel, multi_channel, mlp, fcn };

std::string_view to_string(ModelKind kind);
/// Accepts presnet, single, multi, mlp, fcn. Throws ConfigError otherwise.
ModelKind parse_model_kind(std::string_view name);

/// (filters, kernel) of the four feature smoothing blocks.
struct BlockSpec {
  std::size_t filters;
  std::size_t kernel;
};
inline constexpr std::array<BlockSpec, 4> kResidualBlocks{{{64, 8}, {128, 8}, {256, 5}, {128, 3}}};
inline constexpr std::array<BlockSpec, 3> kFcnBlocks{{{128, 8}, {256, 5}, {128, 3}}};
inline constexpr std::size_t kMaxKernel = 8;
inline constexpr std::size_t kMlpUnits = 500;

/// Everything needed to rebuild a network from scratch.
struct ArchSpec {
  ModelKind kind = ModelKind::presnet;
  std::size_t channels = 1;  // input channels; branch count for multi_channel
  std::size_t window = 10;
  std::size_t classes = 2;
  std::size_t head_units = 128;  // multi_channel only
  std::uint64_t seed = 0;

  /// Canonical key = value text, one key per line, fixed order.
  std::string to_text() const;
  static ArchSpec from_text(std::string_view text);

  friend bool operator==(const ArchSpec&, const ArchSpec&) = default;
};

/// A classifier: ordered layer stack ending in a dense layer whose outputs are
/// the logits of a softmax over `classes`.
class Network {
 public:
  Network(ArchSpec spec, Sequential root);
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const ArchSpec& spec() const noexcept { return spec_; }
  std::size_t classes() const noexcept { return spec_.classes; }
  /// Per-sample input shape [channels, window].
  Shape input_shape() const { return {spec_.channels, spec_.window}; }

  /// batch [N, channels, window] -> logits [N, classes].
  Tensor logits(const Tensor& batch, Mode mode);
  /// batch [N, channels, window] -> class probabilities [N, classes].
  Tensor forward(const Tensor& batch, Mode mode = Mode::infer);
  /// Back-propagates d(loss)/d(logits) from the most recent forward pass,
  /// storing parameter gradients. Returns d(loss)/d(input).
  Tensor backward(const Tensor& grad_logits);

  /// Every parameter tensor in a fixed order (trainable and running state).
  std::vector<ParamSlot> params();
  /// Sum of all parameter tensor sizes, including batch-norm running state.
  std::size_t param_count() const { return root_.param_count(); }
  /// Canonical layer listing.
  std::vector<std::string> layer_specs() const;

  /// Copies of every parameter value, in params() order.
  std::vector<Tensor> snapshot();
  void restore(const std::vector<Tensor>& values);

  Sequential& root() noexcept { return root_; }

  /// The H residual blocks of a single-channel network (or P-ResNet).
  std::vector<ResidualBlock*> hidden_blocks();
  /// For multi_channel networks, the residual blocks of branch k.
  std::vector<ResidualBlock*> branch_blocks(std::size_t k);
  std::size_t branch_count();
  /// Layers after the branches (multi_channel) or after GAP (others).
  std::vector<Layer*> head_layers();

 private:
  void check_input(const Tensor& batch) const;

  ArchSpec spec_;
  Sequential root_;
};

/// Four residual feature smoothing blocks over `channels` inputs, GAP and a
/// softmax layer of `classes` units.
Network build_presnet(std::size_t channels, std::size_t window, std::size_t classes,
                      std::uint64_t seed);
/// Input batch-norm, the four residual blocks on one channel, GAP, softmax.
Network build_single_channel_dnn(std::size_t window, std::size_t classes, std::uint64_t seed);
/// Input batch-norm over `branches` channels, one residual stack with GAP per
/// channel, concatenation, dense(head_units)+ReLU, softmax.
Network build_multi_channel_dnn(std::size_t branches, std::size_t window, std::size_t classes,
                                std::uint64_t seed, std::size_t head_units = 128);
/// MLP (3 x 500 ReLU) or FCN ((128,8),(256,5),(128,3) conv-bn-relu, GAP).
Network build_baseline(ModelKind kind, std::size_t channels, std::size_t window,
                       std::size_t classes, std::uint64_t seed);
/// Dispatches on spec.kind.
Network build_network(const ArchSpec& spec);

}  // namespace dtids
