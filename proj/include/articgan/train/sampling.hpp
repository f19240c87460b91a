#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "articgan/ema.hpp"
#include "articgan/io/checkpoint.hpp"
#include "articgan/models/params.hpp"
#include "articgan/physical/physical_model.hpp"

namespace artic {

struct GeneratedSample {
  EmaTrajectory ema;
  Waveform audio;
};

/// The physical model a checkpoint was trained with.
PhysicalModel physical_from_checkpoint(const Checkpoint& ckpt);

/// Draws `count` latents from Rng(seed) and runs them through G then A.
std::vector<GeneratedSample> generate_samples(const ModelParams& generator, const PhysicalModel& physical,
                                              std::size_t count, std::uint64_t seed);

}  // namespace artic
