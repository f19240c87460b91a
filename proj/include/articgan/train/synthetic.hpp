#pragma once

#include <cstddef>
#include <cstdint>

#include "articgan/ema.hpp"
#include "articgan/io/dataset.hpp"

namespace artic {

inline constexpr std::size_t kSyntheticWords = 8;
inline constexpr std::size_t kSyntheticFrames = 256;

/// Hand-built articulator trajectory for toy word `index` (0..7), 256 frames:
/// an onset consonant gesture, a vowel target and a release, with voicing
/// switched on after the onset.
EmaTrajectory synthetic_word(std::size_t index);

/// The eight toy words rendered through the source-filter model.
Dataset synthetic_dataset(std::uint64_t physical_seed = 0);

}  // namespace artic
