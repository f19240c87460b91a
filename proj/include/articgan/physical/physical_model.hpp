#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "articgan/ad/tensor.hpp"
#include "articgan/ema.hpp"
#include "articgan/models/params.hpp"

namespace artic {

enum class PhysicalKind { kSourceFilter, kFrozenRandom };

std::string_view to_string(PhysicalKind kind);
/// Accepts "source_filter"/"source-filter" and "frozen_random"/"frozen-random".
PhysicalKind parse_physical_kind(std::string_view text);

struct PhysicalModelSpec {
  PhysicalKind kind = PhysicalKind::kSourceFilter;
  std::uint64_t seed = 0;
  std::size_t frame_hop = kSamplesPerFrame;
  std::size_t frame_window = 2 * kSamplesPerFrame;
};

/// Constants of the source-filter synthesizer.
namespace source_filter {
inline constexpr double kF0 = 120.0;
inline constexpr double kInputScale = 2.0;
inline constexpr double kNoiseAmplitude = 0.15;
/// Pre-tanh output level.
inline constexpr double kOutputLevel = 4.0;
inline constexpr double kMinGain = 0.05;
inline constexpr double kMaxGain = 1.0;
struct Formant {
  std::size_t channel;
  double base_hz;
  double range_hz;
  double bandwidth_hz;
};
// F1 <- tb_y, F2 <- tb_x, F3 <- tt_y.
inline constexpr Formant kFormants[3] = {
    {9, 300.0, 400.0, 80.0}, {8, 800.0, 1400.0, 120.0}, {7, 2000.0, 1000.0, 160.0}};
inline constexpr std::size_t kUpperLipY = 3;
inline constexpr std::size_t kLowerLipY = 5;
}  // namespace source_filter

/// Frozen differentiable EMA-to-waveform map: [B x 13 x T] at 200 Hz to
/// [B x 1 x 80T] at 16 kHz. Parameters never require grad.
class PhysicalModel {
 public:
  explicit PhysicalModel(PhysicalModelSpec spec = {});
  /// Frozen-random model with imported weights; they are flagged frozen.
  PhysicalModel(PhysicalModelSpec spec, ModelParams weights);

  const PhysicalModelSpec& spec() const { return spec_; }
  const ModelParams& params() const { return params_; }

  ad::Tensor forward(const ad::Tensor& ema) const;
  Waveform synthesize(const EmaTrajectory& ema) const;

  /// Content hash over the kind, seed, constants and all weights.
  std::uint64_t params_hash() const;

 private:
  PhysicalModelSpec spec_;
  ModelParams params_;
};

/// The source-filter synthesis before the output tanh, as a graph op with a
/// first-order backward only.
ad::Tensor source_filter_synth(const ad::Tensor& ema, std::uint64_t seed);

/// Glottal impulse train at f0 = 120 Hz, phase-continuous from sample 0.
std::vector<double> glottal_pulses(std::size_t length);

}  // namespace artic
