#include "articgan/train/adam.hpp"

#include <cmath>

#include "articgan/error.hpp"

namespace artic {

AdamState AdamState::for_params(std::span<const ad::Tensor> params) {
  AdamState state;
  for (const auto& p : params) {
    state.m.emplace_back(p.numel(), 0.0);
    state.v.emplace_back(p.numel(), 0.0);
  }
  return state;
}

void adam_step(std::span<ad::Tensor> params, std::span<const ad::Tensor> grads, AdamState& state,
               const AdamConfig& config) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ContractViolation("adam: parameter, gradient and state counts differ");
  }
  ++state.step;
  const auto t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto values = params[i].mutable_data();
    auto g = grads[i].data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (g.size() != values.size() || m.size() != values.size()) {
      throw ContractViolation("adam: shape mismatch for parameter " + std::to_string(i));
    }
    for (std::size_t j = 0; j < values.size(); ++j) {
      m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g[j];
      v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      values[j] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
}

}  // namespace artic
