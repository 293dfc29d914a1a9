#include "dtids/kernels.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dtids/error.hpp"

namespace dtids::kernels {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

// Unrolls [N, C, L] into a (C*K) x (N*L) matrix so that the convolution becomes
// one matrix product. Row c*K + k, column n*L + t holds x[n, c, t + k - pad].
RowMatrix im2col(const Tensor& input, std::size_t kernel) {
  const std::size_t n_batch = input.dim(0), channels = input.dim(1), length = input.dim(2);
  const auto pad_left = static_cast<std::ptrdiff_t>(same_padding(kernel).first);
  RowMatrix cols = RowMatrix::Zero(channels * kernel, n_batch * length);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t k = 0; k < kernel; ++k) {
      double* row = cols.data() + (c * kernel + k) * n_batch * length;
      const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - pad_left;
      const std::size_t t_begin = shift < 0 ? static_cast<std::size_t>(-shift) : 0;
      const std::size_t t_end =
          shift > 0 ? (length > static_cast<std::size_t>(shift) ? length - shift : 0) : length;
      for (std::size_t n = 0; n < n_batch; ++n) {
        const double* src = input.raw() + (n * channels + c) * length;
        double* dst = row + n * length;
        for (std::size_t t = t_begin; t < t_end; ++t) dst[t] = src[t + shift];
      }
    }
  }
  return cols;
}

void col2im_add(const RowMatrix& cols, std::size_t kernel, Tensor& grad_input) {
  const std::size_t n_batch = grad_input.dim(0), channels = grad_input.dim(1),
                    length = grad_input.dim(2);
  const auto pad_left = static_cast<std::ptrdiff_t>(same_padding(kernel).first);
  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      double* dst = grad_input.raw() + (n * channels + c) * length;
      for (std::size_t k = 0; k < kernel; ++k) {
        const double* row = cols.data() + (c * kernel + k) * n_batch * length + n * length;
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - pad_left;
        const std::size_t t_begin = shift < 0 ? static_cast<std::size_t>(-shift) : 0;
        const std::size_t t_end =
            shift > 0 ? (length > static_cast<std::size_t>(shift) ? length - shift : 0) : length;
        for (std::size_t t = t_begin; t < t_end; ++t) dst[t + shift] += row[t];
      }
    }
  }
}

void check_conv_shapes(const Tensor& input, const Tensor& weights) {
  expect_rank(input, 3, "conv1d input");
  expect_rank(weights, 3, "conv1d weights");
  if (input.dim(1) != weights.dim(1)) {
    throw ShapeError("conv1d: input has " + std::to_string(input.dim(1)) +
                     " channels but kernels expect " + std::to_string(weights.dim(1)));
  }
}

}  // namespace

Tensor conv1d(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  check_conv_shapes(input, weights);
  const std::size_t n_batch = input.dim(0), length = input.dim(2);
  const std::size_t c_out = weights.dim(0), kernel = weights.dim(2);
  if (bias.size() != c_out) throw ShapeError("conv1d: bias length must equal filter count");

  const RowMatrix cols = im2col(input, kernel);
  ConstMatrixMap w(weights.raw(), c_out, weights.dim(1) * kernel);
  const RowMatrix product = w * cols;

  Tensor out({n_batch, c_out, length});
  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t o = 0; o < c_out; ++o) {
      const double* src = product.data() + o * n_batch * length + n * length;
      double* dst = out.raw() + (n * c_out + o) * length;
      const double b = bias[o];
      for (std::size_t t = 0; t < length; ++t) dst[t] = src[t] + b;
    }
  }
  return out;
}

ConvGrads conv1d_backward(const Tensor& grad_out, const Tensor& input, const Tensor& weights) {
  check_conv_shapes(input, weights);
  const std::size_t n_batch = input.dim(0), c_in = input.dim(1), length = input.dim(2);
  const std::size_t c_out = weights.dim(0), kernel = weights.dim(2);
  if (grad_out.shape() != Shape{n_batch, c_out, length}) {
    throw ShapeError("conv1d_backward: grad_out shape " + shape_string(grad_out.shape()) +
                     " does not match forward output");
  }

  RowMatrix g(c_out, n_batch * length);
  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t o = 0; o < c_out; ++o) {
      const double* src = grad_out.raw() + (n * c_out + o) * length;
      std::copy(src, src + length, g.data() + o * n_batch * length + n * length);
    }
  }

  const RowMatrix cols = im2col(input, kernel);
  ConstMatrixMap w(weights.raw(), c_out, c_in * kernel);

  ConvGrads grads{Tensor(input.shape()), Tensor(weights.shape()), Tensor({c_out})};
  MatrixMap gw(grads.weights.raw(), c_out, c_in * kernel);
  gw.noalias() = g * cols.transpose();
  for (std::size_t o = 0; o < c_out; ++o) grads.bias[o] = g.row(o).sum();

  const RowMatrix gcols = w.transpose() * g;
  col2im_add(gcols, kernel, grads.input);
  return grads;
}

BatchNormState BatchNormState::identity(std::size_t channels, double epsilon, double momentum) {
  BatchNormState s;
  s.gamma = Tensor({channels}, 1.0);
  s.beta = Tensor({channels}, 0.0);
  s.running_mean = Tensor({channels}, 0.0);
  s.running_var = Tensor({channels}, 1.0);
  s.epsilon = epsilon;
  s.momentum = momentum;
  return s;
}

Tensor batchnorm(const Tensor& input, BatchNormState& state, Mode mode, BatchNormCache* cache) {
  expect_rank(input, 3, "batchnorm input");
  const std::size_t n_batch = input.dim(0), channels = input.dim(1), length = input.dim(2);
  if (state.channels() != channels) {
    throw ShapeError("batchnorm: input has " + std::to_string(channels) +
                     " channels, parameters expect " + std::to_string(state.channels()));
  }
  const std::size_t count = n_batch * length;
  if (mode == Mode::train && count < 2) {
    throw DataError("batchnorm: degenerate batch, need at least 2 values per channel in training");
  }

  Tensor out(input.shape());
  std::vector<double> inv_std(channels);
  Tensor normalized;
  if (cache) normalized = Tensor(input.shape());

  for (std::size_t c = 0; c < channels; ++c) {
    double mean, var;
    if (mode == Mode::train) {
      double sum = 0.0;
      for (std::size_t n = 0; n < n_batch; ++n) {
        const double* x = input.raw() + (n * channels + c) * length;
        for (std::size_t t = 0; t < length; ++t) sum += x[t];
      }
      mean = sum / static_cast<double>(count);
      double sq = 0.0;
      for (std::size_t n = 0; n < n_batch; ++n) {
        const double* x = input.raw() + (n * channels + c) * length;
        for (std::size_t t = 0; t < length; ++t) sq += (x[t] - mean) * (x[t] - mean);
      }
      var = sq / static_cast<double>(count);
      const double unbiased = sq / static_cast<double>(count - 1);
      state.running_mean[c] = state.momentum * state.running_mean[c] + (1.0 - state.momentum) * mean;
      state.running_var[c] = state.momentum * state.running_var[c] + (1.0 - state.momentum) * unbiased;
    } else {
      mean = state.running_mean[c];
      var = state.running_var[c];
    }
    inv_std[c] = 1.0 / std::sqrt(var + state.epsilon);
    const double g = state.gamma[c], b = state.beta[c];
    for (std::size_t n = 0; n < n_batch; ++n) {
      const std::size_t off = (n * channels + c) * length;
      for (std::size_t t = 0; t < length; ++t) {
        const double xhat = (input[off + t] - mean) * inv_std[c];
        if (cache) normalized[off + t] = xhat;
        out[off + t] = g * xhat + b;
      }
    }
  }
  if (cache) {
    cache->mode = mode;
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

BatchNormGrads batchnorm_backward(const Tensor& grad_out, const BatchNormState& state,
                                  const BatchNormCache& cache) {
  expect_same_shape(grad_out, cache.normalized, "batchnorm_backward");
  const std::size_t n_batch = grad_out.dim(0), channels = grad_out.dim(1),
                    length = grad_out.dim(2);
  const double count = static_cast<double>(n_batch * length);
  BatchNormGrads grads{Tensor(grad_out.shape()), Tensor({channels}), Tensor({channels})};

  for (std::size_t c = 0; c < channels; ++c) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (std::size_t n = 0; n < n_batch; ++n) {
      const std::size_t off = (n * channels + c) * length;
      for (std::size_t t = 0; t < length; ++t) {
        sum_dy += grad_out[off + t];
        sum_dy_xhat += grad_out[off + t] * cache.normalized[off + t];
      }
    }
    grads.gamma[c] = sum_dy_xhat;
    grads.beta[c] = sum_dy;
    const double scale = state.gamma[c] * cache.inv_std[c];
    for (std::size_t n = 0; n < n_batch; ++n) {
      const std::size_t off = (n * channels + c) * length;
      for (std::size_t t = 0; t < length; ++t) {
        if (cache.mode == Mode::train) {
          grads.input[off + t] =
              scale * (grad_out[off + t] - sum_dy / count -
                       cache.normalized[off + t] * sum_dy_xhat / count);
        } else {
          grads.input[off + t] = scale * grad_out[off + t];
        }
      }
    }
  }
  return grads;
}

Tensor relu(const Tensor& input) {
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > 0.0 ? input[i] : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& grad_out, const Tensor& input) {
  expect_same_shape(grad_out, input, "relu_backward");
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > 0.0 ? grad_out[i] : 0.0;
  return out;
}

Tensor global_average_pool(const Tensor& input) {
  expect_rank(input, 3, "global_average_pool input");
  const std::size_t n_batch = input.dim(0), channels = input.dim(1), length = input.dim(2);
  Tensor out({n_batch, channels});
  for (std::size_t i = 0; i < n_batch * channels; ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < length; ++t) sum += input[i * length + t];
    out[i] = sum / static_cast<double>(length);
  }
  return out;
}

Tensor global_average_pool_backward(const Tensor& grad_out, std::size_t length) {
  expect_rank(grad_out, 2, "global_average_pool_backward grad");
  if (length == 0) throw ShapeError("global_average_pool_backward: length must be positive");
  Tensor out({grad_out.dim(0), grad_out.dim(1), length});
  const double inv = 1.0 / static_cast<double>(length);
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    for (std::size_t t = 0; t < length; ++t) out[i * length + t] = grad_out[i] * inv;
  }
  return out;
}

Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  expect_rank(input, 2, "dense input");
  expect_rank(weights, 2, "dense weights");
  const std::size_t n_batch = input.dim(0), features = input.dim(1), units = weights.dim(0);
  if (weights.dim(1) != features) {
    throw ShapeError("dense: input has " + std::to_string(features) +
                     " features but weights expect " + std::to_string(weights.dim(1)));
  }
  if (bias.size() != units) throw ShapeError("dense: bias length must equal unit count");
  Tensor out({n_batch, units});
  ConstMatrixMap x(input.raw(), n_batch, features);
  ConstMatrixMap w(weights.raw(), units, features);
  MatrixMap y(out.raw(), n_batch, units);
  y.noalias() = x * w.transpose();
  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t u = 0; u < units; ++u) y(n, u) += bias[u];
  }
  return out;
}

DenseGrads dense_backward(const Tensor& grad_out, const Tensor& input, const Tensor& weights) {
  expect_rank(grad_out, 2, "dense_backward grad");
  const std::size_t n_batch = input.dim(0), features = input.dim(1), units = weights.dim(0);
  if (grad_out.shape() != Shape{n_batch, units}) {
    throw ShapeError("dense_backward: grad_out shape " + shape_string(grad_out.shape()) +
                     " does not match forward output");
  }
  DenseGrads grads{Tensor(input.shape()), Tensor(weights.shape()), Tensor({units})};
  ConstMatrixMap g(grad_out.raw(), n_batch, units);
  ConstMatrixMap x(input.raw(), n_batch, features);
  ConstMatrixMap w(weights.raw(), units, features);
  MatrixMap(grads.input.raw(), n_batch, features).noalias() = g * w;
  MatrixMap(grads.weights.raw(), units, features).noalias() = g.transpose() * x;
  for (std::size_t u = 0; u < units; ++u) {
    double s = 0.0;
    for (std::size_t n = 0; n < n_batch; ++n) s += g(n, u);
    grads.bias[u] = s;
  }
  return grads;
}

Tensor softmax(const Tensor& logits) {
  expect_rank(logits, 2, "softmax logits");
  const std::size_t n_batch = logits.dim(0), classes = logits.dim(1);
  Tensor probs(logits.shape());
  for (std::size_t n = 0; n < n_batch; ++n) {
    const double* z = logits.raw() + n * classes;
    double* p = probs.raw() + n * classes;
    const double top = *std::max_element(z, z + classes);
    double total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      p[c] = std::exp(z[c] - top);
      total += p[c];
    }
    for (std::size_t c = 0; c < classes; ++c) p[c] /= total;
  }
  return probs;
}

LossResult softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                                 std::span<const double> class_weights) {
  expect_rank(logits, 2, "softmax_cross_entropy logits");
  const std::size_t n_batch = logits.dim(0), classes = logits.dim(1);
  if (classes < 2) throw ShapeError("softmax_cross_entropy: need at least 2 classes");
  if (labels.size() != n_batch) {
    throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(n_batch) + " samples");
  }
  if (!class_weights.empty() && class_weights.size() != classes) {
    throw ShapeError("softmax_cross_entropy: class weight count must equal class count");
  }

  LossResult r;
  r.grad_logits = Tensor(logits.shape());
  r.probs = Tensor(logits.shape());
  const double inv_n = 1.0 / static_cast<double>(n_batch);
  double total = 0.0;
  for (std::size_t n = 0; n < n_batch; ++n) {
    const int label = labels[n];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw ShapeError("softmax_cross_entropy: label " + std::to_string(label) + " out of range");
    }
    const double* z = logits.raw() + n * classes;
    double* p = r.probs.raw() + n * classes;
    const double top = *std::max_element(z, z + classes);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(z[c] - top);
    const double log_sum = std::log(sum);
    for (std::size_t c = 0; c < classes; ++c) p[c] = std::exp(z[c] - top - log_sum);
    const double w = class_weights.empty() ? 1.0 : class_weights[label];
    // -ln p[label] computed in log space so that saturated logits stay finite.
    total += w * (log_sum - (z[label] - top));
    double* g = r.grad_logits.raw() + n * classes;
    for (std::size_t c = 0; c < classes; ++c) {
      g[c] = w * (p[c] - (static_cast<int>(c) == label ? 1.0 : 0.0)) * inv_n;
    }
  }
  r.loss = total * inv_n;
  return r;
}

Tensor residual_add(const Tensor& a, const Tensor& b) {
  expect_same_shape(a, b, "residual_add");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

}  // namespace dtids::kernels
