#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "articgan/ad/tensor.hpp"
#include "articgan/models/params.hpp"
#include "articgan/rng.hpp"

namespace artic {

inline constexpr std::size_t kLatentDim = 100;
inline constexpr std::size_t kProjectedLength = 16;
inline constexpr std::array<std::size_t, 5> kGeneratorStrides = {2, 2, 2, 1, 2};
/// Channel widths of the projection and the five upsampling layers at full width.
inline constexpr std::size_t kProjectedChannels = 512;
inline constexpr std::array<std::size_t, 5> kGeneratorChannels = {512, 512, 256, 256, 13};

struct GeneratorConfig {
  /// Hidden widths are divided by this factor (the 13 output channels are not).
  std::size_t width_divisor = 1;
  std::size_t kernel = 25;
};

/// Per-item (channels, length) of each upsampling layer's output.
struct ActivationTrace {
  std::vector<std::array<std::size_t, 2>> layers;
};

ModelParams init_generator(const GeneratorConfig& config, std::uint64_t seed);

/// z[B x 100] -> EMA batch [B x 13 x 256] in (-1, 1).
ad::Tensor generator_forward(const ModelParams& params, const ad::Tensor& z, ActivationTrace* trace = nullptr);

/// B latent vectors drawn i.i.d. uniform on [-1, 1].
ad::Tensor sample_latent(Rng& rng, std::size_t batch);

/// Width divisor recovered from parameter shapes.
std::size_t generator_width_divisor(const ModelParams& params);

}  // namespace artic
