#pragma once

#include <filesystem>

#include "articgan/ema.hpp"

namespace artic {

/// Reads RIFF/WAVE PCM 16-bit mono 16 kHz; samples are scaled by 1/32768.
/// Anything else is rejected with a FormatError naming the offending field.
Waveform wav_read(const std::filesystem::path& path);

/// Writes PCM 16-bit mono 16 kHz, rounding to nearest and clamping to the
/// 16-bit range.
void wav_write(const std::filesystem::path& path, const Waveform& wave);

}  // namespace artic
