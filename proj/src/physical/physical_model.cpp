#include "articgan/physical/physical_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "articgan/ad/ops.hpp"
#include "articgan/error.hpp"
#include "articgan/hash.hpp"
#include "articgan/rng.hpp"

namespace artic {

namespace sf = source_filter;

namespace {

constexpr std::size_t kHop = kSamplesPerFrame;
constexpr std::size_t kWindow = 2 * kSamplesPerFrame;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Periodic Hann window; overlapping copies at hop kHop sum to one.
const std::array<double, kWindow>& hann() {
  static const auto table = [] {
    std::array<double, kWindow> w{};
    for (std::size_t n = 0; n < kWindow; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(kWindow));
    }
    return w;
  }();
  return table;
}

std::vector<double> noise(std::uint64_t seed, std::size_t length) {
  Rng rng(seed);
  std::vector<double> out(length);
  for (auto& v : out) v = sf::kNoiseAmplitude * rng.uniform(-1.0, 1.0);
  return out;
}

// Articulatory controls of one frame and their derivatives w.r.t. the inputs.
struct FrameControls {
  double voicing = 0.0, d_voicing = 0.0;
  double gain = 0.0, d_gain = 0.0;
  std::array<double, 3> omega{}, d_omega{};
};

FrameControls frame_controls(const double* ema, std::size_t frames, std::size_t t) {
  FrameControls fc;
  const double v_raw = 0.5 * (ema[kVoicingChannel * frames + t] + 1.0);
  fc.voicing = std::clamp(v_raw, 0.0, 1.0);
  fc.d_voicing = (v_raw >= 0.0 && v_raw <= 1.0) ? 0.5 : 0.0;

  const double lip = ema[sf::kUpperLipY * frames + t] - ema[sf::kLowerLipY * frames + t];
  const double g_raw = 0.5 * (1.0 + 0.5 * lip);
  fc.gain = std::clamp(g_raw, sf::kMinGain, sf::kMaxGain);
  fc.d_gain = (g_raw >= sf::kMinGain && g_raw <= sf::kMaxGain) ? 0.25 : 0.0;

  for (std::size_t k = 0; k < 3; ++k) {
    const auto& f = sf::kFormants[k];
    const double s = logistic(sf::kInputScale * ema[f.channel * frames + t]);
    const double hz = f.base_hz + f.range_hz * s;
    const double to_omega = 2.0 * std::numbers::pi / kAudioRate;
    fc.omega[k] = to_omega * hz;
    fc.d_omega[k] = to_omega * f.range_hz * s * (1.0 - s) * sf::kInputScale;
  }
  return fc;
}

struct Resonator {
  double radius;
  double amplitude;
};

std::array<Resonator, 3> resonators() {
  std::array<Resonator, 3> out{};
  for (std::size_t k = 0; k < 3; ++k) {
    const double r = std::exp(-std::numbers::pi * sf::kFormants[k].bandwidth_hz / kAudioRate);
    out[k] = {r, 2.0 * (1.0 - r)};
  }
  return out;
}

// h[m] = sum_k a_k r_k^m cos(w_k m); dh_k[m] = d h / d w_k.
void formant_fir(const FrameControls& fc, double* h, std::array<std::array<double, kWindow>, 3>* dh) {
  static const auto res = resonators();
  std::fill(h, h + kWindow, 0.0);
  for (std::size_t k = 0; k < 3; ++k) {
    const std::complex<double> step = std::polar(res[k].radius, fc.omega[k]);
    std::complex<double> p = 1.0;
    for (std::size_t m = 0; m < kWindow; ++m) {
      h[m] += res[k].amplitude * p.real();
      if (dh) (*dh)[k][m] = -res[k].amplitude * static_cast<double>(m) * p.imag();
      p *= step;
    }
  }
}

class SourceFilterNode final : public ad::Node {
 public:
  SourceFilterNode(std::vector<ad::Tensor> inputs, std::uint64_t seed) : Node(std::move(inputs)), seed_(seed) {}
  const char* name() const override { return "source_filter_synth"; }
  bool has_second_order() const override { return false; }

  std::vector<ad::Tensor> backward(const ad::Tensor& g, const ad::Tensor&, const ad::Needs&) const override {
    const auto& ema = inputs()[0];
    const auto batch = ema.dim(0), frames = ema.dim(2);
    const auto out_len = kHop * frames;
    const auto pulses = glottal_pulses(out_len + kHop);
    const auto xi = noise(seed_, out_len + kHop);
    const auto& w = hann();
    std::vector<double> grad(ema.numel(), 0.0);
    std::array<double, kWindow> h{}, src{}, y{}, upstream{}, dh_total{}, dsrc{};
    std::array<std::array<double, kWindow>, 3> dh{};
    for (std::size_t b = 0; b < batch; ++b) {
      const double* e = ema.data().data() + b * kEmaChannels * frames;
      const double* gout = g.data().data() + b * out_len;
      double* ge = grad.data() + b * kEmaChannels * frames;
      for (std::size_t t = 0; t < frames; ++t) {
        const auto fc = frame_controls(e, frames, t);
        formant_fir(fc, h.data(), &dh);
        const auto start = t * kHop;
        for (std::size_t n = 0; n < kWindow; ++n) {
          src[n] = fc.voicing * pulses[start + n] + (1.0 - fc.voicing) * xi[start + n];
        }
        double d_gain = 0.0;
        for (std::size_t n = 0; n < kWindow; ++n) {
          double acc = 0.0;
          for (std::size_t m = 0; m <= n; ++m) acc += h[m] * src[n - m];
          y[n] = acc;
          const double go = start + n < out_len ? gout[start + n] * sf::kOutputLevel : 0.0;
          upstream[n] = go * fc.gain * w[n];
          d_gain += go * w[n] * acc;
        }
        for (std::size_t m = 0; m < kWindow; ++m) {
          double acc_h = 0.0, acc_s = 0.0;
          for (std::size_t n = m; n < kWindow; ++n) {
            acc_h += upstream[n] * src[n - m];
            acc_s += upstream[n] * h[n - m];
          }
          dh_total[m] = acc_h;
          dsrc[m] = acc_s;
        }
        double d_voicing = 0.0;
        for (std::size_t q = 0; q < kWindow; ++q) d_voicing += dsrc[q] * (pulses[start + q] - xi[start + q]);
        ge[kVoicingChannel * frames + t] += d_voicing * fc.d_voicing;
        ge[sf::kUpperLipY * frames + t] += d_gain * fc.d_gain;
        ge[sf::kLowerLipY * frames + t] -= d_gain * fc.d_gain;
        for (std::size_t k = 0; k < 3; ++k) {
          double d_omega = 0.0;
          for (std::size_t m = 0; m < kWindow; ++m) d_omega += dh_total[m] * dh[k][m];
          ge[sf::kFormants[k].channel * frames + t] += d_omega * fc.d_omega[k];
        }
      }
    }
    return {ad::Tensor(ema.shape(), std::move(grad))};
  }

 private:
  std::uint64_t seed_;
};

ad::Tensor frozen_random_forward(const ModelParams& params, const ad::Tensor& ema) {
  static constexpr std::size_t kStrides[3] = {4, 4, 5};
  ad::Tensor h = ema;
  for (std::size_t i = 0; i < 3; ++i) {
    h = ad::tanh(ad::conv1d_transpose(h, params.at("layer" + std::to_string(i + 1) + ".k"), kStrides[i]));
  }
  return h;
}

ModelParams init_frozen_random(std::uint64_t seed) {
  static constexpr std::size_t kChannels[4] = {kEmaChannels, 64, 32, 1};
  static constexpr std::size_t kStrides[3] = {4, 4, 5};
  Rng rng(seed);
  ModelParams params;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto ksize = 2 * kStrides[i];
    const double fan_in = static_cast<double>(kChannels[i] * ksize) / static_cast<double>(kStrides[i]);
    const double bound = 1.0 / std::sqrt(fan_in);
    ad::Shape shape{kChannels[i], kChannels[i + 1], ksize};
    std::vector<double> values(ad::numel(shape));
    for (auto& v : values) v = rng.uniform(-bound, bound);
    params.add("layer" + std::to_string(i + 1) + ".k", ad::Tensor(std::move(shape), std::move(values)), false);
  }
  return params;
}

void check_spec(const PhysicalModelSpec& spec) {
  if (spec.frame_hop != kHop || spec.frame_window != kWindow) {
    throw ContractViolation("physical model: frame hop/window must be 80/160 (16 kHz / 200 Hz)");
  }
}

}  // namespace

std::string_view to_string(PhysicalKind kind) {
  return kind == PhysicalKind::kSourceFilter ? "source_filter" : "frozen_random";
}

PhysicalKind parse_physical_kind(std::string_view text) {
  if (text == "source_filter" || text == "source-filter") return PhysicalKind::kSourceFilter;
  if (text == "frozen_random" || text == "frozen-random") return PhysicalKind::kFrozenRandom;
  throw ContractViolation("unknown physical model kind '" + std::string(text) + "'");
}

std::vector<double> glottal_pulses(std::size_t length) {
  // Impulse wherever floor(n * f0 / fs) advances; f0 / fs = 3 / 400.
  std::vector<double> p(length, 0.0);
  for (std::size_t n = 0; n < length; ++n) {
    if (n == 0 || (3 * n) / 400 != (3 * (n - 1)) / 400) p[n] = 1.0;
  }
  return p;
}

ad::Tensor source_filter_synth(const ad::Tensor& ema, std::uint64_t seed) {
  if (ema.rank() != 3 || ema.dim(1) != kEmaChannels) {
    throw ContractViolation("physical model: EMA batch must be [B x 13 x T], got " + ad::to_string(ema.shape()));
  }
  const auto batch = ema.dim(0), frames = ema.dim(2);
  if (frames < 2) throw ContractViolation("physical model: need at least 2 EMA frames");
  for (double v : ema.data()) {
    if (!std::isfinite(v)) throw ContractViolation("physical model: non-finite EMA value");
  }
  const auto out_len = kHop * frames;
  const auto pulses = glottal_pulses(out_len + kHop);
  const auto xi = noise(seed, out_len + kHop);
  const auto& w = hann();
  std::vector<double> out(batch * out_len, 0.0);
  std::array<double, kWindow> h{}, src{};
  for (std::size_t b = 0; b < batch; ++b) {
    const double* e = ema.data().data() + b * kEmaChannels * frames;
    double* o = out.data() + b * out_len;
    for (std::size_t t = 0; t < frames; ++t) {
      const auto fc = frame_controls(e, frames, t);
      formant_fir(fc, h.data(), nullptr);
      const auto start = t * kHop;
      for (std::size_t n = 0; n < kWindow; ++n) {
        src[n] = fc.voicing * pulses[start + n] + (1.0 - fc.voicing) * xi[start + n];
      }
      const std::size_t limit = std::min(kWindow, out_len - start);
      for (std::size_t n = 0; n < limit; ++n) {
        double acc = 0.0;
        for (std::size_t m = 0; m <= n; ++m) acc += h[m] * src[n - m];
        o[start + n] += sf::kOutputLevel * fc.gain * w[n] * acc;
      }
    }
  }
  ad::Tensor result({batch, 1, out_len}, std::move(out));
  if (ad::needs_graph({&ema})) attach(result, std::make_shared<SourceFilterNode>(std::vector<ad::Tensor>{ema}, seed));
  return result;
}

PhysicalModel::PhysicalModel(PhysicalModelSpec spec) : spec_(spec) {
  check_spec(spec_);
  if (spec_.kind == PhysicalKind::kFrozenRandom) params_ = init_frozen_random(spec_.seed);
}

PhysicalModel::PhysicalModel(PhysicalModelSpec spec, ModelParams weights) : spec_(spec) {
  check_spec(spec_);
  if (spec_.kind != PhysicalKind::kFrozenRandom) {
    throw ContractViolation("physical model: weight import applies to frozen_random only");
  }
  const auto reference = init_frozen_random(spec_.seed);
  for (const auto& p : reference.entries()) {
    if (!weights.contains(p.name) || weights.at(p.name).shape() != p.value.shape()) {
      throw ContractViolation("physical model: imported weights lack '" + p.name + "' of shape " +
                              ad::to_string(p.value.shape()));
    }
  }
  weights.set_trainable(false);
  params_ = std::move(weights);
}

ad::Tensor PhysicalModel::forward(const ad::Tensor& ema) const {
  if (ema.rank() != 3 || ema.dim(1) != kEmaChannels || ema.dim(2) < 2) {
    throw ContractViolation("physical model: EMA batch must be [B x 13 x T] with T >= 2, got " +
                            ad::to_string(ema.shape()));
  }
  if (spec_.kind == PhysicalKind::kSourceFilter) return ad::tanh(source_filter_synth(ema, spec_.seed));
  for (double v : ema.data()) {
    if (!std::isfinite(v)) throw ContractViolation("physical model: non-finite EMA value");
  }
  return frozen_random_forward(params_, ema);
}

Waveform PhysicalModel::synthesize(const EmaTrajectory& ema) const {
  ad::NoGradGuard no_grad;
  const auto frames = ema.frames();
  const auto out = forward(ad::Tensor({1, kEmaChannels, frames}, ema.flatten()));
  return Waveform{std::vector<double>(out.data().begin(), out.data().end()), kAudioRate};
}

std::uint64_t PhysicalModel::params_hash() const {
  Fnv1a h;
  h.update(to_string(spec_.kind));
  h.update_value(spec_.seed);
  h.update_value(static_cast<std::uint64_t>(spec_.frame_hop));
  h.update_value(static_cast<std::uint64_t>(spec_.frame_window));
  if (spec_.kind == PhysicalKind::kSourceFilter) {
    h.update_value(sf::kF0);
    h.update_value(sf::kInputScale);
    h.update_value(sf::kNoiseAmplitude);
    h.update_value(sf::kOutputLevel);
    for (const auto& f : sf::kFormants) {
      h.update_value(f.base_hz);
      h.update_value(f.range_hz);
      h.update_value(f.bandwidth_hz);
    }
  }
  h.update_value(params_.hash());
  return h.digest();
}

}  // namespace artic
