#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "articgan/ad/tensor.hpp"
#include "articgan/models/params.hpp"
#include "articgan/rng.hpp"

namespace artic {

inline constexpr std::size_t kAudioLength = 20480;
inline constexpr std::size_t kCriticStride = 4;
inline constexpr std::array<std::size_t, 5> kCriticChannels = {64, 128, 256, 512, 512};
inline constexpr double kCriticSlope = 0.2;
inline constexpr int kPhaseShuffleRadius = 2;

struct CriticConfig {
  std::size_t width_divisor = 1;
  std::size_t kernel = 25;
};

/// Shifts the last axis by `shift` with reflection at the edges:
/// y[i] = x[reflect(i + shift)]. |shift| must be below the length.
ad::Tensor phase_shuffle(const ad::Tensor& x, int shift);

/// Draws one shift uniformly from [-radius, radius] and applies it to the
/// whole batch. The shift is a constant for differentiation.
ad::Tensor phase_shuffle(const ad::Tensor& x, int radius, Rng& rng);

/// Phase-shuffle setting for a critic pass; radius 0 or no rng disables it.
struct PhaseShuffle {
  int radius = 0;
  Rng* rng = nullptr;
};

ModelParams init_critic(const CriticConfig& config, std::uint64_t seed);

/// audio[B x 1 x 20480] -> scores [B x 1]. Five stride-4 convolutions with
/// leaky ReLU, phase shuffle after the first four, then a dense read-out.
ad::Tensor critic_forward(const ModelParams& params, const ad::Tensor& audio, PhaseShuffle shuffle = {});

std::size_t critic_width_divisor(const ModelParams& params);

}  // namespace artic
