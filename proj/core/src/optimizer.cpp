#include "dtids/optimizer.hpp"

#include <cmath>
#include <string>

#include "dtids/error.hpp"

namespace dtids {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::adam ? "adam" : "adadelta";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "adadelta") return OptimizerKind::adadelta;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected adam or adadelta)");
}

namespace {
void size_state(std::vector<double>& v, std::size_t n) {
  if (v.empty()) v.assign(n, 0.0);
  if (v.size() != n) throw ShapeError("optimizer state is not congruent with its parameters");
}
}  // namespace

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamParams& hp) {
  if (grads.size() != params.size()) throw ShapeError("adam: gradient/parameter size mismatch");
  size_state(state.first_moment, params.size());
  size_state(state.second_moment, params.size());
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(hp.beta1, t);
  const double c2 = 1.0 - std::pow(hp.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = hp.beta1 * m + (1.0 - hp.beta1) * g;
    v = hp.beta2 * v + (1.0 - hp.beta2) * g * g;
    params[i] -= hp.learning_rate * (m / c1) / (std::sqrt(v / c2) + hp.epsilon);
  }
}

void adadelta_step(std::span<double> params, std::span<const double> grads, AdaDeltaState& state,
                   const AdaDeltaParams& hp) {
  if (grads.size() != params.size()) throw ShapeError("adadelta: gradient/parameter size mismatch");
  size_state(state.mean_sq_grad, params.size());
  size_state(state.mean_sq_update, params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& eg = state.mean_sq_grad[i];
    double& ex = state.mean_sq_update[i];
    eg = hp.rho * eg + (1.0 - hp.rho) * g * g;
    const double dx = -std::sqrt(ex + hp.epsilon) / std::sqrt(eg + hp.epsilon) * g;
    ex = hp.rho * ex + (1.0 - hp.rho) * dx * dx;
    params[i] += hp.learning_rate * dx;
  }
}

void Optimizer::step(const std::vector<ParamSlot>& slots) {
  if (kind_ == OptimizerKind::adam) {
    adam_states_.resize(slots.size());
  } else {
    adadelta_states_.resize(slots.size());
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto& slot = slots[i];
    if (!slot.trainable || slot.grad == nullptr) continue;
    if (kind_ == OptimizerKind::adam) {
      adam_step(slot.value->data(), slot.grad->data(), adam_states_[i], adam_);
    } else {
      adadelta_step(slot.value->data(), slot.grad->data(), adadelta_states_[i], adadelta_);
    }
  }
}

}  // namespace dtids
