#include "articgan/models/critic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "articgan/ad/ops.hpp"
#include "articgan/error.hpp"

namespace artic {

namespace {

std::size_t scaled(std::size_t channels, std::size_t divisor) { return std::max<std::size_t>(1, channels / divisor); }

std::string layer_name(std::size_t i, const char* field) { return "conv" + std::to_string(i + 1) + "." + field; }

std::size_t reflect(std::ptrdiff_t i, std::size_t length) {
  const auto n = static_cast<std::ptrdiff_t>(length);
  if (i < 0) i = -i;
  if (i >= n) i = 2 * (n - 1) - i;
  return static_cast<std::size_t>(i);
}

}  // namespace

ad::Tensor phase_shuffle(const ad::Tensor& x, int shift) {
  const auto length = x.shape().back();
  if (static_cast<std::size_t>(std::abs(shift)) >= length) {
    throw ContractViolation("phase_shuffle: shift " + std::to_string(shift) + " not below length " +
                            std::to_string(length));
  }
  if (shift == 0) return x;
  std::vector<std::size_t> index(length);
  for (std::size_t i = 0; i < length; ++i) index[i] = reflect(static_cast<std::ptrdiff_t>(i) + shift, length);
  return ad::gather_last(x, std::move(index));
}

ad::Tensor phase_shuffle(const ad::Tensor& x, int radius, Rng& rng) {
  if (radius < 0) throw ContractViolation("phase_shuffle: radius must be >= 0");
  if (static_cast<std::size_t>(radius) >= x.shape().back()) {
    throw ContractViolation("phase_shuffle: radius " + std::to_string(radius) + " not below length " +
                            std::to_string(x.shape().back()));
  }
  if (radius == 0) return x;
  return phase_shuffle(x, static_cast<int>(rng.uniform_int(-radius, radius)));
}

ModelParams init_critic(const CriticConfig& config, std::uint64_t seed) {
  if (config.width_divisor == 0 || config.kernel == 0) throw ContractViolation("critic: invalid config");
  Rng rng(seed);
  ModelParams params;
  auto uniform = [&](ad::Shape shape, double bound) {
    std::vector<double> values(ad::numel(shape));
    for (auto& v : values) v = rng.uniform(-bound, bound);
    return ad::Tensor(std::move(shape), std::move(values));
  };
  std::size_t in_ch = 1;
  std::size_t length = kAudioLength;
  for (std::size_t i = 0; i < kCriticChannels.size(); ++i) {
    const auto out_ch = scaled(kCriticChannels[i], config.width_divisor);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_ch * config.kernel));
    params.add(layer_name(i, "k"), uniform({out_ch, in_ch, config.kernel}, bound), true);
    params.add(layer_name(i, "b"), ad::Tensor::zeros({out_ch}), true);
    in_ch = out_ch;
    length /= kCriticStride;
  }
  const auto features = in_ch * length;
  params.add("out.w", uniform({features, 1}, 1.0 / std::sqrt(static_cast<double>(features))), true);
  params.add("out.b", ad::Tensor::zeros({1}), true);
  return params;
}

ad::Tensor critic_forward(const ModelParams& params, const ad::Tensor& audio, PhaseShuffle shuffle) {
  if (audio.rank() != 3 || audio.dim(1) != 1 || audio.dim(2) != kAudioLength) {
    throw ContractViolation("critic: audio must be [B x 1 x 20480], got " + ad::to_string(audio.shape()));
  }
  const auto batch = audio.dim(0);
  ad::Tensor h = audio;
  for (std::size_t i = 0; i < kCriticChannels.size(); ++i) {
    const auto& k = params.at(layer_name(i, "k"));
    if (k.rank() != 3 || k.dim(1) != h.dim(1)) {
      throw ContractViolation("critic: " + layer_name(i, "k") + " has shape " + ad::to_string(k.shape()));
    }
    h = ad::add_channel_bias(ad::conv1d_same(h, k, kCriticStride), params.at(layer_name(i, "b")));
    h = ad::leaky_relu(h, kCriticSlope);
    if (i + 1 < kCriticChannels.size() && shuffle.rng && shuffle.radius > 0) {
      h = phase_shuffle(h, shuffle.radius, *shuffle.rng);
    }
  }
  h = ad::reshape(h, {batch, h.dim(1) * h.dim(2)});
  return ad::dense(h, params.at("out.w"), params.at("out.b"));
}

std::size_t critic_width_divisor(const ModelParams& params) {
  return std::max<std::size_t>(1, kCriticChannels[0] / params.at("conv1.k").dim(0));
}

}  // namespace artic
