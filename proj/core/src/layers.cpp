#include "dtids/layers.hpp"

#include <cmath>
#include <string>

#include "dtids/error.hpp"

namespace dtids {

namespace {

std::string join(const std::string& prefix, const char* name) {
  return prefix.empty() ? std::string(name) : prefix + "." + name;
}

void he_uniform(Tensor& t, std::size_t fan_in, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (auto& v : t.data()) v = rng.uniform(-limit, limit);
}

[[noreturn]] void missing_cache(const char* layer) {
  throw StateError(std::string(layer) + ": backward called without a forward pass");
}

}  // namespace

// --- Conv1dLayer ------------------------------------------------------------

Conv1dLayer::Conv1dLayer(std::size_t in_channels, std::size_t filters, std::size_t kernel,
                         Rng& rng)
    : weights_({filters, in_channels, kernel}), bias_({filters}) {
  he_uniform(weights_, in_channels * kernel, rng);
}

Tensor Conv1dLayer::forward(const Tensor& input, Mode) {
  input_ = input;
  return kernels::conv1d(input, weights_, bias_);
}

Tensor Conv1dLayer::backward(const Tensor& grad_out) {
  if (input_.empty()) missing_cache("conv1d");
  auto g = kernels::conv1d_backward(grad_out, input_, weights_);
  grad_weights_ = std::move(g.weights);
  grad_bias_ = std::move(g.bias);
  return std::move(g.input);
}

Shape Conv1dLayer::output_shape(const Shape& input) const {
  if (input.size() != 2 || input[0] != weights_.dim(1)) {
    throw ShapeError("conv1d expects [" + std::to_string(weights_.dim(1)) + ", L], got " +
                     shape_string(input));
  }
  return {weights_.dim(0), input[1]};
}

void Conv1dLayer::collect(const std::string& prefix, std::vector<ParamSlot>& out) {
  if (grad_weights_.empty()) {
    grad_weights_ = Tensor::zeros_like(weights_);
    grad_bias_ = Tensor::zeros_like(bias_);
  }
  out.push_back({join(prefix, "weight"), &weights_, &grad_weights_, !frozen_});
  out.push_back({join(prefix, "bias"), &bias_, &grad_bias_, !frozen_});
}

void Conv1dLayer::describe(std::vector<std::string>& lines) const {
  lines.push_back("conv1d in=" + std::to_string(weights_.dim(1)) +
                  " filters=" + std::to_string(filters()) + " kernel=" + std::to_string(kernel()));
}

// --- BatchNormLayer ---------------------------------------------------------

BatchNormLayer::BatchNormLayer(std::size_t channels)
    : state_(kernels::BatchNormState::identity(channels)) {}

Tensor BatchNormLayer::forward(const Tensor& input, Mode mode) {
  const Mode effective = frozen_ ? Mode::infer : mode;
  has_cache_ = true;
  return kernels::batchnorm(input, state_, effective, &cache_);
}

Tensor BatchNormLayer::backward(const Tensor& grad_out) {
  if (!has_cache_) missing_cache("batchnorm");
  auto g = kernels::batchnorm_backward(grad_out, state_, cache_);
  grad_gamma_ = std::move(g.gamma);
  grad_beta_ = std::move(g.beta);
  return std::move(g.input);
}

void BatchNormLayer::collect(const std::string& prefix, std::vector<ParamSlot>& out) {
  if (grad_gamma_.empty()) {
    grad_gamma_ = Tensor::zeros_like(state_.gamma);
    grad_beta_ = Tensor::zeros_like(state_.beta);
  }
  out.push_back({join(prefix, "gamma"), &state_.gamma, &grad_gamma_, !frozen_});
  out.push_back({join(prefix, "beta"), &state_.beta, &grad_beta_, !frozen_});
  out.push_back({join(prefix, "running_mean"), &state_.running_mean, nullptr, false});
  out.push_back({join(prefix, "running_var"), &state_.running_var, nullptr, false});
}

void BatchNormLayer::describe(std::vector<std::string>& lines) const {
  lines.push_back("batchnorm channels=" + std::to_string(state_.channels()));
}

// --- ReluLayer --------------------------------------------------------------

Tensor ReluLayer::forward(const Tensor& input, Mode) {
  input_ = input;
  return kernels::relu(input);
}

Tensor ReluLayer::backward(const Tensor& grad_out) {
  if (input_.empty()) missing_cache("relu");
  return kernels::relu_backward(grad_out, input_);
}

void ReluLayer::describe(std::vector<std::string>& lines) const { lines.emplace_back("relu"); }

// --- GlobalAveragePoolLayer -------------------------------------------------

Tensor GlobalAveragePoolLayer::forward(const Tensor& input, Mode) {
  expect_rank(input, 3, "gap input");
  length_ = input.dim(2);
  return kernels::global_average_pool(input);
}

Tensor GlobalAveragePoolLayer::backward(const Tensor& grad_out) {
  if (length_ == 0) missing_cache("gap");
  return kernels::global_average_pool_backward(grad_out, length_);
}

Shape GlobalAveragePoolLayer::output_shape(const Shape& input) const {
  if (input.size() != 2) throw ShapeError("gap expects [C, L], got " + shape_string(input));
  return {input[0]};
}

void GlobalAveragePoolLayer::describe(std::vector<std::string>& lines) const {
  lines.emplace_back("gap");
}

// --- FlattenLayer -----------------------------------------------------------

Tensor FlattenLayer::forward(const Tensor& input, Mode) {
  expect_rank(input, 3, "flatten input");
  input_shape_ = input.shape();
  return input.reshaped({input.dim(0), input.dim(1) * input.dim(2)});
}

Tensor FlattenLayer::backward(const Tensor& grad_out) {
  if (input_shape_.empty()) missing_cache("flatten");
  return grad_out.reshaped(input_shape_);
}

Shape FlattenLayer::output_shape(const Shape& input) const {
  if (input.size() != 2) throw ShapeError("flatten expects [C, L], got " + shape_string(input));
  return {input[0] * input[1]};
}

void FlattenLayer::describe(std::vector<std::string>& lines) const {
  lines.emplace_back("flatten");
}

// --- DenseLayer -------------------------------------------------------------

DenseLayer::DenseLayer(std::size_t in_features, std::size_t units, Rng& rng)
    : weights_({units, in_features}), bias_({units}) {
  he_uniform(weights_, in_features, rng);
}

Tensor DenseLayer::forward(const Tensor& input, Mode) {
  input_ = input;
  return kernels::dense(input, weights_, bias_);
}

Tensor DenseLayer::backward(const Tensor& grad_out) {
  if (input_.empty()) missing_cache("dense");
  auto g = kernels::dense_backward(grad_out, input_, weights_);
  grad_weights_ = std::move(g.weights);
  grad_bias_ = std::move(g.bias);
  return std::move(g.input);
}

Shape DenseLayer::output_shape(const Shape& input) const {
  if (input.size() != 1 || input[0] != weights_.dim(1)) {
    throw ShapeError("dense expects [" + std::to_string(weights_.dim(1)) + "], got " +
                     shape_string(input));
  }
  return {weights_.dim(0)};
}

void DenseLayer::collect(const std::string& prefix, std::vector<ParamSlot>& out) {
  if (grad_weights_.empty()) {
    grad_weights_ = Tensor::zeros_like(weights_);
    grad_bias_ = Tensor::zeros_like(bias_);
  }
  out.push_back({join(prefix, "weight"), &weights_, &grad_weights_, !frozen_});
  out.push_back({join(prefix, "bias"), &bias_, &grad_bias_, !frozen_});
}

void DenseLayer::describe(std::vector<std::string>& lines) const {
  lines.push_back("dense in=" + std::to_string(weights_.dim(1)) +
                  " units=" + std::to_string(weights_.dim(0)));
}

// --- ResidualBlock ----------------------------------------------------------

ResidualBlock::ResidualBlock(std::size_t in_channels, std::size_t filters, std::size_t kernel,
                             Rng& rng)
    : conv_(in_channels, filters, kernel, rng), bn_(filters) {
  if (in_channels != filters) shortcut_ = std::make_unique<Conv1dLayer>(in_channels, filters, 1, rng);
}

ResidualBlock::ResidualBlock(const ResidualBlock& other)
    : Layer(other),
      conv_(other.conv_),
      bn_(other.bn_),
      shortcut_(other.shortcut_ ? std::make_unique<Conv1dLayer>(*other.shortcut_) : nullptr),
      pre_activation_(other.pre_activation_) {}

Tensor ResidualBlock::forward(const Tensor& input, Mode mode) {
  Tensor body = bn_.forward(conv_.forward(input, mode), mode);
  Tensor skip = shortcut_ ? shortcut_->forward(input, mode) : input;
  pre_activation_ = kernels::residual_add(body, skip);
  return kernels::relu(pre_activation_);
}

Tensor ResidualBlock::backward(const Tensor& grad_out) {
  if (pre_activation_.empty()) missing_cache("residual block");
  // The sum node hands the same gradient to both branches.
  const Tensor g = kernels::relu_backward(grad_out, pre_activation_);
  Tensor grad_input = conv_.backward(bn_.backward(g));
  const Tensor grad_skip = shortcut_ ? shortcut_->backward(g) : g;
  for (std::size_t i = 0; i < grad_input.size(); ++i) grad_input[i] += grad_skip[i];
  return grad_input;
}

Shape ResidualBlock::output_shape(const Shape& input) const { return conv_.output_shape(input); }

std::size_t ResidualBlock::param_count() const {
  return conv_.param_count() + bn_.param_count() + (shortcut_ ? shortcut_->param_count() : 0);
}

void ResidualBlock::collect(const std::string& prefix, std::vector<ParamSlot>& out) {
  conv_.collect(join(prefix, "conv"), out);
  bn_.collect(join(prefix, "bn"), out);
  if (shortcut_) shortcut_->collect(join(prefix, "shortcut"), out);
}

void ResidualBlock::describe(std::vector<std::string>& lines) const {
  lines.emplace_back("residual_begin");
  conv_.describe(lines);
  bn_.describe(lines);
  if (shortcut_) {
    std::vector<std::string> sc;
    shortcut_->describe(sc);
    lines.push_back("shortcut " + sc.front());
  }
  lines.emplace_back("residual_end");
  lines.emplace_back("relu");
}

void ResidualBlock::set_frozen(bool frozen) {
  Layer::set_frozen(frozen);
  conv_.set_frozen(frozen);
  bn_.set_frozen(frozen);
  if (shortcut_) shortcut_->set_frozen(frozen);
}

// --- Sequential -------------------------------------------------------------

Sequential::Sequential(const Sequential& other) : Layer(other) {
  layers_.reserve(other.layers_.size());
  for (const auto& [name, layer] : other.layers_) layers_.emplace_back(name, layer->clone());
}

void Sequential::add(std::string name, LayerPtr layer) {
  layers_.emplace_back(std::move(name), std::move(layer));
}

Tensor Sequential::forward(const Tensor& input, Mode mode) {
  if (layers_.empty()) return input;
  Tensor x = layers_.front().second->forward(input, mode);
  for (std::size_t i = 1; i < layers_.size(); ++i) x = layers_[i].second->forward(x, mode);
  return x;
}

Tensor Sequential::backward(const Tensor& grad_out) {
  Tensor g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = it->second->backward(g);
  return g;
}

Shape Sequential::output_shape(const Shape& input) const {
  Shape s = input;
  for (const auto& entry : layers_) s = entry.second->output_shape(s);
  return s;
}

std::size_t Sequential::param_count() const {
  std::size_t n = 0;
  for (const auto& entry : layers_) n += entry.second->param_count();
  return n;
}

void Sequential::collect(const std::string& prefix, std::vector<ParamSlot>& out) {
  for (auto& [name, layer] : layers_) layer->collect(prefix.empty() ? name : prefix + "." + name, out);
}

void Sequential::describe(std::vector<std::string>& lines) const {
  for (const auto& entry : layers_) entry.second->describe(lines);
}

void Sequential::set_frozen(bool frozen) {
  Layer::set_frozen(frozen);
  for (auto& entry : layers_) entry.second->set_frozen(frozen);
}

// --- BranchConcat -----------------------------------------------------------

BranchConcat::BranchConcat(std::vector<Sequential> branches) : branches_(std::move(branches)) {
  if (branches_.empty()) throw ConfigError("branch concatenation needs at least one branch");
}

BranchConcat::BranchConcat(const BranchConcat& other)
    : Layer(other),
      branches_(other.branches_),
      branch_features_(other.branch_features_),
      input_shape_(other.input_shape_) {}

Tensor BranchConcat::forward(const Tensor& input, Mode mode) {
  expect_rank(input, 3, "branch input");
  const std::size_t n_batch = input.dim(0), channels = input.dim(1), length = input.dim(2);
  if (channels != branches_.size()) {
    throw ShapeError("branches: input has " + std::to_string(channels) + " channels for " +
                     std::to_string(branches_.size()) + " branches");
  }
  input_shape_ = input.shape();
  std::vector<Tensor> outputs;
  outputs.reserve(channels);
  branch_features_.assign(channels, 0);
  std::size_t total = 0;
  for (std::size_t k = 0; k < channels; ++k) {
    Tensor channel({n_batch, 1, length});
    for (std::size_t n = 0; n < n_batch; ++n) {
      const double* src = input.raw() + (n * channels + k) * length;
      std::copy(src, src + length, channel.raw() + n * length);
    }
    outputs.push_back(branches_[k].forward(channel, mode));
    expect_rank(outputs.back(), 2, "branch output");
    branch_features_[k] = outputs.back().dim(1);
    total += branch_features_[k];
  }
  Tensor out({n_batch, total});
  for (std::size_t n = 0; n < n_batch; ++n) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < channels; ++k) {
      const double* src = outputs[k].raw() + n * branch_features_[k];
      std::copy(src, src + branch_features_[k], out.raw() + n * total + offset);
      offset += branch_features_[k];
    }
  }
  return out;
}

Tensor BranchConcat::backward(const Tensor& grad_out) {
  if (input_shape_.empty()) missing_cache("branches");
  const std::size_t n_batch = input_shape_[0], channels = input_shape_[1], length = input_shape_[2];
  const std::size_t total = grad_out.dim(1);
  Tensor grad_input(input_shape_);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < channels; ++k) {
    const std::size_t f = branch_features_[k];
    Tensor g({n_batch, f});
    for (std::size_t n = 0; n < n_batch; ++n) {
      const double* src = grad_out.raw() + n * total + offset;
      std::copy(src, src + f, g.raw() + n * f);
    }
    offset += f;
    const Tensor gi = branches_[k].backward(g);
    for (std::size_t n = 0; n < n_batch; ++n) {
      std::copy(gi.raw() + n * length, gi.raw() + (n + 1) * length,
                grad_input.raw() + (n * channels + k) * length);
    }
  }
  return grad_input;
}

Shape BranchConcat::output_shape(const Shape& input) const {
  if (input.size() != 2 || input[0] != branches_.size()) {
    throw ShapeError("branches expect [" + std::to_string(branches_.size()) + ", L], got " +
                     shape_string(input));
  }
  std::size_t total = 0;
  for (const auto& b : branches_) {
    const Shape s = b.output_shape({1, input[1]});
    if (s.size() != 1) throw ShapeError("branch output must be a feature vector");
    total += s[0];
  }
  return {total};
}

std::size_t BranchConcat::param_count() const {
  std::size_t n = 0;
  for (const auto& b : branches_) n += b.param_count();
  return n;
}

void BranchConcat::collect(const std::string& prefix, std::vector<ParamSlot>& out) {
  for (std::size_t k = 0; k < branches_.size(); ++k) {
    const std::string name = "branch" + std::to_string(k + 1);
    branches_[k].collect(prefix.empty() ? name : prefix + "." + name, out);
  }
}

void BranchConcat::describe(std::vector<std::string>& lines) const {
  lines.push_back("branches count=" + std::to_string(branches_.size()));
  std::vector<std::string> inner;
  branches_.front().describe(inner);
  for (auto& l : inner) lines.push_back("  " + l);
  lines.push_back("concat features=" + std::to_string(output_shape({branches_.size(), 8})[0]));
}

void BranchConcat::set_frozen(bool frozen) {
  Layer::set_frozen(frozen);
  for (auto& b : branches_) b.set_frozen(frozen);
}

}  // namespace dtids
