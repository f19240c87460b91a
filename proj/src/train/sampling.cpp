#include "articgan/train/sampling.hpp"

#include "articgan/ad/tensor.hpp"
#include "articgan/models/generator.hpp"
#include "articgan/rng.hpp"
#include "articgan/train/trainer.hpp"

namespace artic {

PhysicalModel physical_from_checkpoint(const Checkpoint& ckpt) {
  const auto config = TrainConfig::from_map(ckpt.config);
  const PhysicalModelSpec spec{config.physical_kind, config.physical_seed};
  if (config.physical_kind == PhysicalKind::kFrozenRandom) return PhysicalModel(spec, ckpt.extract_params("phys."));
  return PhysicalModel(spec);
}

std::vector<GeneratedSample> generate_samples(const ModelParams& generator, const PhysicalModel& physical,
                                              std::size_t count, std::uint64_t seed) {
  ad::NoGradGuard no_grad;
  Rng rng(seed);
  std::vector<GeneratedSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto ema = generator_forward(generator, sample_latent(rng, 1));
    const auto audio = physical.forward(ema);
    GeneratedSample s;
    s.ema = EmaTrajectory::from_flat({ema.data().begin(), ema.data().end()}, ema.dim(2));
    s.audio.samples.assign(audio.data().begin(), audio.data().end());
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace artic
