#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "articgan/ad/tensor.hpp"

namespace artic {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double eps = 1e-8;
};

/// First/second moment estimates, one buffer per parameter tensor.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t step = 0;

  static AdamState for_params(std::span<const ad::Tensor> params);
  bool operator==(const AdamState&) const = default;
};

/// Bias-corrected Adam update applied in place to the parameter values.
void adam_step(std::span<ad::Tensor> params, std::span<const ad::Tensor> grads, AdamState& state,
               const AdamConfig& config);

}  // namespace artic
