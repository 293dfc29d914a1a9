#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dtids/tensor.hpp"

// Forward and backward kernels for the layer types of the residual networks.
// All kernels are batched: sequences are [N, C, L], feature vectors [N, F].
// They are pure functions over caller-owned tensors.
namespace dtids::kernels {

enum class Mode { train, infer };

/// Zero "same" padding for a kernel of length k: floor((k-1)/2) on the left,
/// ceil((k-1)/2) on the right.
constexpr std::pair<std::size_t, std::size_t> same_padding(std::size_t k) {
  return {(k - 1) / 2, k / 2};
}

/// Cross-correlation of input [N, C_in, L] with weights [C_out, C_in, K] plus
/// bias [C_out]. Output is [N, C_out, L].
Tensor conv1d(const Tensor& input, const Tensor& weights, const Tensor& bias);

struct ConvGrads {
  Tensor input;
  Tensor weights;
  Tensor bias;
};

ConvGrads conv1d_backward(const Tensor& grad_out, const Tensor& input, const Tensor& weights);

struct BatchNormState {
  Tensor gamma;
  Tensor beta;
  Tensor running_mean;
  Tensor running_var;
  double epsilon = 1e-5;
  double momentum = 0.9;

  static BatchNormState identity(std::size_t channels, double epsilon = 1e-5,
                                 double momentum = 0.9);
  std::size_t channels() const noexcept { return gamma.size(); }
};

struct BatchNormCache {
  Mode mode = Mode::infer;
  Tensor normalized;            // x-hat, same shape as the input
  std::vector<double> inv_std;  // per channel
};

/// Batch normalisation over [N, C, L] with per-channel statistics.
///
/// Train mode normalises with the biased batch variance and folds the batch
/// mean and unbiased variance into the running statistics:
///   running = momentum * running + (1 - momentum) * batch.
/// Throws DataError when N*L < 2 in train mode.
Tensor batchnorm(const Tensor& input, BatchNormState& state, Mode mode,
                 BatchNormCache* cache = nullptr);

struct BatchNormGrads {
  Tensor input;
  Tensor gamma;
  Tensor beta;
};

BatchNormGrads batchnorm_backward(const Tensor& grad_out, const BatchNormState& state,
                                  const BatchNormCache& cache);

Tensor relu(const Tensor& input);
/// Passes the gradient where input > 0; zero at and below 0.
Tensor relu_backward(const Tensor& grad_out, const Tensor& input);

/// [N, C, L] -> [N, C], mean over L.
Tensor global_average_pool(const Tensor& input);
Tensor global_average_pool_backward(const Tensor& grad_out, std::size_t length);

/// input [N, F], weights [F_out, F], bias [F_out] -> [N, F_out].
Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias);

struct DenseGrads {
  Tensor input;
  Tensor weights;
  Tensor bias;
};

DenseGrads dense_backward(const Tensor& grad_out, const Tensor& input, const Tensor& weights);

/// Row-wise softmax of [N, C] logits, stabilised by max subtraction.
Tensor softmax(const Tensor& logits);

struct LossResult {
  double loss = 0.0;  // mean over the batch
  Tensor probs;
  Tensor grad_logits;
};

/// Categorical cross-entropy of softmax(logits) against integer labels.
/// Optional per-class weights scale each sample's loss; the mean is still
/// taken over N.
LossResult softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                                 std::span<const double> class_weights = {});

/// Elementwise a + b; the backward pass hands grad_out unchanged to both.
Tensor residual_add(const Tensor& a, const Tensor& b);

}  // namespace dtids::kernels
