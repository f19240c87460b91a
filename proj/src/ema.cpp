#include "articgan/ema.hpp"

#include "articgan/error.hpp"

namespace artic {

std::optional<std::size_t> ema_channel_index(std::string_view name) {
  for (std::size_t i = 0; i < kEmaChannelNames.size(); ++i) {
    if (kEmaChannelNames[i] == name) return i;
  }
  return std::nullopt;
}

EmaTrajectory EmaTrajectory::zeros(std::size_t frames) {
  EmaTrajectory ema;
  for (auto& ch : ema.channels) ch.assign(frames, 0.0);
  return ema;
}

std::vector<double> EmaTrajectory::flatten() const {
  std::vector<double> out;
  out.reserve(kEmaChannels * frames());
  for (const auto& ch : channels) {
    if (ch.size() != frames()) throw ContractViolation("EMA channels have unequal lengths");
    out.insert(out.end(), ch.begin(), ch.end());
  }
  return out;
}

EmaTrajectory EmaTrajectory::from_flat(const std::vector<double>& values, std::size_t frames) {
  if (values.size() != kEmaChannels * frames) {
    throw ContractViolation("EMA buffer holds " + std::to_string(values.size()) + " values, expected 13 x " +
                            std::to_string(frames));
  }
  EmaTrajectory ema;
  for (std::size_t c = 0; c < kEmaChannels; ++c) {
    ema.channels[c].assign(values.begin() + static_cast<std::ptrdiff_t>(c * frames),
                           values.begin() + static_cast<std::ptrdiff_t>((c + 1) * frames));
  }
  return ema;
}

}  // namespace artic
