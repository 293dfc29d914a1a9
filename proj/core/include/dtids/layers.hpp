#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "dtids/kernels.hpp"
#include "dtids/rng.hpp"
#include "dtids/tensor.hpp"

namespace dtids {

using kernels::Mode;

/// A named parameter tensor exposed to optimizers, checkpoints and transfer.
struct ParamSlot {
  std::string name;
  Tensor* value = nullptr;
  Tensor* grad = nullptr;  // null for non-trainable state such as running statistics
  bool trainable = true;   // false for running statistics and frozen layers
};

/// Base class of every layer. Forward caches what backward needs; calling
/// backward without a preceding forward throws StateError. Shapes passed to
/// output_shape exclude the batch axis.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::unique_ptr<Layer> clone() const = 0;
  virtual Tensor forward(const Tensor& input, Mode mode) = 0;
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual Shape output_shape(const Shape& input) const = 0;
  virtual std::size_t param_count() const { return 0; }
  virtual void collect(const std::string& prefix, std::vector<ParamSlot>& out) {
    (void)prefix;
    (void)out;
  }
  /// Appends the canonical one-line-per-layer description.
  virtual void describe(std::vector<std::string>& lines) const = 0;

  virtual void set_frozen(bool frozen) { frozen_ = frozen; }
  bool frozen() const noexcept { return frozen_; }

 protected:
  bool frozen_ = false;
};

using LayerPtr = std::unique_ptr<Layer>;

class Conv1dLayer : public Layer {
 public:
  /// He-uniform weights drawn from rng, zero bias.
  Conv1dLayer(std::size_t in_channels, std::size_t filters, std::size_t kernel, Rng& rng);

  LayerPtr clone() const override { return std::make_unique<Conv1dLayer>(*this); }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& input) const override;
  std::size_t param_count() const override { return weights_.size() + bias_.size(); }
  void collect(const std::string& prefix, std::vector<ParamSlot>& out) override;
  void describe(std::vector<std::string>& lines) const override;

  Tensor& weights() { return weights_; }
  Tensor& bias() { return bias_; }
  std::size_t filters() const { return weights_.dim(0); }
  std::size_t kernel() const { return weights_.dim(2); }

 private:
  Tensor weights_, bias_;
  Tensor grad_weights_, grad_bias_;
  Tensor input_;
};

/// Batch normalisation over [N, C, L]. A frozen layer always normalises with
/// its running statistics and leaves them untouched.
class BatchNormLayer : public Layer {
 public:
  explicit BatchNormLayer(std::size_t channels);

  LayerPtr clone() const override { return std::make_unique<BatchNormLayer>(*this); }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& input) const override { return input; }
  std::size_t param_count() const override { return 4 * state_.channels(); }
  void collect(const std::string& prefix, std::vector<ParamSlot>& out) override;
  void describe(std::vector<std::string>& lines) const override;

  kernels::BatchNormState& state() { return state_; }

 private:
  kernels::BatchNormState state_;
  Tensor grad_gamma_, grad_beta_;
  kernels::BatchNormCache cache_;
  bool has_cache_ = false;
};

class ReluLayer : public Layer {
 public:
  LayerPtr clone() const override { return std::make_unique<ReluLayer>(*this); }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& input) const override { return input; }
  void describe(std::vector<std::string>& lines) const override;

 private:
  Tensor input_;
};

/// [N, C, L] -> [N, C]
class GlobalAveragePoolLayer : public Layer {
 public:
  LayerPtr clone() const override { return std::make_unique<GlobalAveragePoolLayer>(*this); }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& input) const override;
  void describe(std::vector<std::string>& lines) const override;

 private:
  std::size_t length_ = 0;
};

/// [N, C, L] -> [N, C*L]
class FlattenLayer : public Layer {
 public:
  LayerPtr clone() const override { return std::make_unique<FlattenLayer>(*this); }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& input) const override;
  void describe(std::vector<std::string>& lines) const override;

 private:
  Shape input_shape_;
};

class DenseLayer : public Layer {
 public:
  DenseLayer(std::size_t in_features, std::size_t units, Rng& rng);

  LayerPtr clone() const override { return std::make_unique<DenseLayer>(*this); }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& input) const override;
  std::size_t param_count() const override { return weights_.size() + bias_.size(); }
  void collect(const std::string& prefix, std::vector<ParamSlot>& out) override;
  void describe(std::vector<std::string>& lines) const override;

  Tensor& weights() { return weights_; }
  Tensor& bias() { return bias_; }

 private:
  Tensor weights_, bias_;
  Tensor grad_weights_, grad_bias_;
  Tensor input_;
};

/// Feature smoothing block with a skip connection:
///   y = relu(bn(conv(x)) + shortcut(x))
/// where shortcut is the identity when channel counts agree and a kernel-1
/// convolution otherwise.
class ResidualBlock : public Layer {
 public:
  ResidualBlock(std::size_t in_channels, std::size_t filters, std::size_t kernel, Rng& rng);
  ResidualBlock(const ResidualBlock& other);
  ResidualBlock& operator=(const ResidualBlock&) = delete;

  LayerPtr clone() const override { return std::make_unique<ResidualBlock>(*this); }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& input) const override;
  std::size_t param_count() const override;
  void collect(const std::string& prefix, std::vector<ParamSlot>& out) override;
  void describe(std::vector<std::string>& lines) const override;
  void set_frozen(bool frozen) override;

  bool has_projection() const { return shortcut_ != nullptr; }

 private:
  Conv1dLayer conv_;
  BatchNormLayer bn_;
  std::unique_ptr<Conv1dLayer> shortcut_;
  Tensor pre_activation_;
};

/// Ordered stack of named layers.
class Sequential : public Layer {
 public:
  Sequential() = default;
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential&) = delete;
  Sequential(Sequential&&) = default;

  void add(std::string name, LayerPtr layer);

  LayerPtr clone() const override { return std::make_unique<Sequential>(*this); }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& input) const override;
  std::size_t param_count() const override;
  void collect(const std::string& prefix, std::vector<ParamSlot>& out) override;
  void describe(std::vector<std::string>& lines) const override;
  void set_frozen(bool frozen) override;

  std::size_t size() const { return layers_.size(); }
  Layer& at(std::size_t i) { return *layers_[i].second; }
  const std::string& name_at(std::size_t i) const { return layers_[i].first; }

 private:
  std::vector<std::pair<std::string, LayerPtr>> layers_;
};

/// Splits [N, S, L] into S single-channel inputs, runs branch k on channel k
/// and concatenates the [N, F] branch outputs into [N, S*F].
class BranchConcat : public Layer {
 public:
  explicit BranchConcat(std::vector<Sequential> branches);
  BranchConcat(const BranchConcat& other);
  BranchConcat& operator=(const BranchConcat&) = delete;

  LayerPtr clone() const override { return std::make_unique<BranchConcat>(*this); }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& input) const override;
  std::size_t param_count() const override;
  void collect(const std::string& prefix, std::vector<ParamSlot>& out) override;
  void describe(std::vector<std::string>& lines) const override;
  void set_frozen(bool frozen) override;

  std::size_t branch_count() const { return branches_.size(); }
  Sequential& branch(std::size_t k) { return branches_[k]; }

 private:
  std::vector<Sequential> branches_;
  std::vector<std::size_t> branch_features_;
  Shape input_shape_;
};

}  // namespace dtids
