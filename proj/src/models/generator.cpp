#include "articgan/models/generator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "articgan/ad/ops.hpp"
#include "articgan/error.hpp"

namespace artic {

namespace {

std::size_t scaled(std::size_t channels, std::size_t divisor) { return std::max<std::size_t>(1, channels / divisor); }

ad::Tensor uniform_tensor(Rng& rng, ad::Shape shape, double bound) {
  std::vector<double> values(ad::numel(shape));
  for (auto& v : values) v = rng.uniform(-bound, bound);
  return ad::Tensor(std::move(shape), std::move(values));
}

std::string layer_name(std::size_t i, const char* field) { return "up" + std::to_string(i + 1) + "." + field; }

}  // namespace

ModelParams init_generator(const GeneratorConfig& config, std::uint64_t seed) {
  if (config.width_divisor == 0 || config.kernel == 0) throw ContractViolation("generator: invalid config");
  Rng rng(seed);
  ModelParams params;
  const auto c0 = scaled(kProjectedChannels, config.width_divisor);
  const double dense_bound = 1.0 / std::sqrt(static_cast<double>(kLatentDim));
  params.add("dense.w", uniform_tensor(rng, {kLatentDim, kProjectedLength * c0}, dense_bound), true);
  params.add("dense.b", ad::Tensor::zeros({kProjectedLength * c0}), true);
  std::size_t in_ch = c0;
  for (std::size_t i = 0; i < kGeneratorChannels.size(); ++i) {
    const bool last = i + 1 == kGeneratorChannels.size();
    const auto out_ch = last ? kGeneratorChannels[i] : scaled(kGeneratorChannels[i], config.width_divisor);
    // Each transposed-conv output sums in_ch * kernel / stride terms.
    const double fan_in = static_cast<double>(in_ch * config.kernel) / static_cast<double>(kGeneratorStrides[i]);
    const double bound = 1.0 / std::sqrt(fan_in);
    params.add(layer_name(i, "k"), uniform_tensor(rng, {in_ch, out_ch, config.kernel}, bound), true);
    params.add(layer_name(i, "b"), ad::Tensor::zeros({out_ch}), true);
    in_ch = out_ch;
  }
  return params;
}

ad::Tensor generator_forward(const ModelParams& params, const ad::Tensor& z, ActivationTrace* trace) {
  if (z.rank() != 2 || z.dim(1) != kLatentDim) {
    throw ContractViolation("generator: latent batch must be [B x 100], got " + ad::to_string(z.shape()));
  }
  const auto& dense_w = params.at("dense.w");
  if (dense_w.rank() != 2 || dense_w.dim(0) != kLatentDim || dense_w.dim(1) % kProjectedLength != 0) {
    throw ContractViolation("generator: dense.w must be [100 x 16*C], got " + ad::to_string(dense_w.shape()));
  }
  const auto batch = z.dim(0);
  auto channels = dense_w.dim(1) / kProjectedLength;
  ad::Tensor h = ad::dense(z, dense_w, params.at("dense.b"));
  h = ad::relu(ad::reshape(h, {batch, channels, kProjectedLength}));
  if (trace) trace->layers.clear();

  for (std::size_t i = 0; i < kGeneratorStrides.size(); ++i) {
    const auto& k = params.at(layer_name(i, "k"));
    const auto& b = params.at(layer_name(i, "b"));
    if (k.rank() != 3 || k.dim(0) != channels || b.rank() != 1 || b.dim(0) != k.dim(1)) {
      throw ContractViolation("generator: " + layer_name(i, "k") + " has shape " + ad::to_string(k.shape()) +
                              ", expected [" + std::to_string(channels) + " x F x K]");
    }
    const bool last = i + 1 == kGeneratorStrides.size();
    if (last && k.dim(1) != kGeneratorChannels.back()) {
      throw ContractViolation("generator: final layer must emit 13 channels");
    }
    h = ad::add_channel_bias(ad::conv1d_transpose(h, k, kGeneratorStrides[i]), b);
    h = last ? ad::tanh(h) : ad::relu(h);
    channels = k.dim(1);
    if (trace) trace->layers.push_back({h.dim(1), h.dim(2)});
  }
  return h;
}

ad::Tensor sample_latent(Rng& rng, std::size_t batch) {
  std::vector<double> z(batch * kLatentDim);
  for (auto& v : z) v = rng.uniform(-1.0, 1.0);
  return ad::Tensor({batch, kLatentDim}, std::move(z));
}

std::size_t generator_width_divisor(const ModelParams& params) {
  const auto c0 = params.at("dense.w").dim(1) / kProjectedLength;
  return std::max<std::size_t>(1, kProjectedChannels / c0);
}

}  // namespace artic
