#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace artic {

inline constexpr std::size_t kEmaChannels = 13;
inline constexpr std::size_t kArticulatorChannels = 12;
inline constexpr std::size_t kVoicingChannel = 12;
inline constexpr double kEmaRate = 200.0;
inline constexpr double kAudioRate = 16000.0;
inline constexpr std::size_t kSamplesPerFrame = 80;

inline constexpr std::array<std::string_view, kEmaChannels> kEmaChannelNames = {
    "li_x", "li_y", "ul_x", "ul_y", "ll_x", "ll_y", "tt_x", "tt_y", "tb_x", "tb_y", "td_x", "td_y", "voicing"};

/// Long names of the six sensor placements, in channel-pair order.
inline constexpr std::array<std::string_view, 6> kPlaceNames = {
    "lower_incisor", "upper_lip", "lower_lip", "tongue_tip", "tongue_body", "tongue_dorsum"};

std::optional<std::size_t> ema_channel_index(std::string_view name);

/// Thirteen channels of T samples at 200 Hz.
struct EmaTrajectory {
  std::array<std::vector<double>, kEmaChannels> channels;

  static EmaTrajectory zeros(std::size_t frames);
  std::size_t frames() const { return channels[0].size(); }
  /// Channel-major [13 x T] copy.
  std::vector<double> flatten() const;
  static EmaTrajectory from_flat(const std::vector<double>& values, std::size_t frames);
  bool operator==(const EmaTrajectory&) const = default;
};

/// Mono samples at 16 kHz.
struct Waveform {
  std::vector<double> samples;
  double sample_rate = kAudioRate;
  bool operator==(const Waveform&) const = default;
};

}  // namespace artic
