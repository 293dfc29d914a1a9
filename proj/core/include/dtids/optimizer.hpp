#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dtids/layers.hpp"

namespace dtids {

enum class OptimizerKind { adam, adadelta };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

struct AdamParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdaDeltaParams {
  double learning_rate = 1.0;
  double rho = 0.95;
  double epsilon = 1e-6;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;
};

struct AdaDeltaState {
  std::vector<double> mean_sq_grad;
  std::vector<double> mean_sq_update;
};

/// One bias-corrected Adam update. Empty state is zero-initialised to the
/// parameter size; any other size mismatch throws ShapeError.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamParams& hp);

/// One AdaDelta update:
///   E[g^2]  <- rho E[g^2]  + (1-rho) g^2
///   dx      <- -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
///   E[dx^2] <- rho E[dx^2] + (1-rho) dx^2
///   x       <- x + lr * dx
void adadelta_step(std::span<double> params, std::span<const double> grads, AdaDeltaState& state,
                   const AdaDeltaParams& hp);

/// Applies one of the two update rules to every trainable slot of a network.
/// State is keyed by slot position, so the slot list must keep its order.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, AdamParams adam = {}, AdaDeltaParams adadelta = {})
      : kind_(kind), adam_(adam), adadelta_(adadelta) {}

  void step(const std::vector<ParamSlot>& slots);
  OptimizerKind kind() const noexcept { return kind_; }

 private:
  OptimizerKind kind_;
  AdamParams adam_;
  AdaDeltaParams adadelta_;
  std::vector<AdamState> adam_states_;
  std::vector<AdaDeltaState> adadelta_states_;
};

}  // namespace dtids
