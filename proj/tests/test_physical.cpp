#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "articgan/ad/engine.hpp"
#include "articgan/ad/ops.hpp"
#include "articgan/error.hpp"
#include "articgan/physical/physical_model.hpp"
#include "articgan/rng.hpp"

using namespace artic;

namespace {

EmaTrajectory random_ema(std::size_t frames, std::uint64_t seed) {
  Rng rng(seed);
  auto ema = EmaTrajectory::zeros(frames);
  for (auto& ch : ema.channels)
    for (auto& v : ch) v = rng.uniform(-0.9, 0.9);
  return ema;
}

// Independent restatement of the synthesizer with pow/cos instead of rotation.
std::vector<double> reference_synth(const EmaTrajectory& ema, std::uint64_t seed) {
  const std::size_t T = ema.frames(), hop = 80, win = 160, len = hop * T;
  Rng rng(seed);
  std::vector<double> noise(len + hop);
  for (auto& v : noise) v = 0.15 * rng.uniform(-1.0, 1.0);
  std::vector<double> pulse(len + hop, 0.0);
  for (std::size_t n = 0; n < pulse.size(); ++n) {
    const double a = std::floor(n * 120.0 / 16000.0);
    const double b = n == 0 ? -1.0 : std::floor((n - 1) * 120.0 / 16000.0);
    pulse[n] = a != b ? 1.0 : 0.0;
  }
  auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  std::vector<double> out(len, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const double v = std::clamp((ema.channels[12][t] + 1.0) / 2.0, 0.0, 1.0);
    const double f[3] = {300 + 400 * sig(2 * ema.channels[9][t]), 800 + 1400 * sig(2 * ema.channels[8][t]),
                         2000 + 1000 * sig(2 * ema.channels[7][t])};
    const double bw[3] = {80, 120, 160};
    const double g = std::clamp(0.5 * (1 + 0.5 * (ema.channels[3][t] - ema.channels[5][t])), 0.05, 1.0);
    std::vector<double> h(win, 0.0);
    for (int k = 0; k < 3; ++k) {
      const double r = std::exp(-std::numbers::pi * bw[k] / 16000.0);
      for (std::size_t m = 0; m < win; ++m)
        h[m] += 2 * (1 - r) * std::pow(r, m) * std::cos(2 * std::numbers::pi * f[k] / 16000.0 * m);
    }
    for (std::size_t n = 0; n < win && t * hop + n < len; ++n) {
      double acc = 0;
      for (std::size_t m = 0; m <= n; ++m) {
        const auto i = t * hop + n - m;
        acc += h[m] * (v * pulse[i] + (1 - v) * noise[i]);
      }
      const double w = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * n / 160.0);
      out[t * hop + n] += 4.0 * g * w * acc;
    }
  }
  for (auto& y : out) y = std::tanh(y);
  return out;
}

}  // namespace

TEST(PhysicalModel, MapsFramesToSamples) {
  const PhysicalModel model;
  const auto wave = model.synthesize(random_ema(256, 1));
  EXPECT_EQ(wave.samples.size(), 20480u);
  EXPECT_EQ(wave.sample_rate, 16000.0);
  for (double v : wave.samples) EXPECT_LE(std::abs(v), 1.0);
}

TEST(PhysicalModel, FrozenRandomShapesAndFlags) {
  const PhysicalModel model({PhysicalKind::kFrozenRandom, 4});
  EXPECT_EQ(model.synthesize(random_ema(256, 2)).samples.size(), 20480u);
  EXPECT_GT(model.params().size(), 0u);
  for (const auto& p : model.params().entries()) {
    EXPECT_FALSE(p.trainable);
    EXPECT_FALSE(p.value.requires_grad());
  }
}

TEST(PhysicalModel, SourceFilterMatchesReference) {
  const auto ema = random_ema(6, 3);
  const auto got = PhysicalModel({PhysicalKind::kSourceFilter, 9}).synthesize(ema).samples;
  const auto want = reference_synth(ema, 9);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12) << i;
}

TEST(PhysicalModel, Deterministic) {
  const auto ema = random_ema(20, 5);
  for (auto kind : {PhysicalKind::kSourceFilter, PhysicalKind::kFrozenRandom}) {
    EXPECT_EQ(PhysicalModel({kind, 3}).synthesize(ema), PhysicalModel({kind, 3}).synthesize(ema));
    EXPECT_EQ(PhysicalModel({kind, 3}).params_hash(), PhysicalModel({kind, 3}).params_hash());
  }
  EXPECT_NE(PhysicalModel({PhysicalKind::kFrozenRandom, 3}).params_hash(),
            PhysicalModel({PhysicalKind::kFrozenRandom, 4}).params_hash());
}

TEST(PhysicalModel, GradientReachesInputsNotParams) {
  const PhysicalModel model({PhysicalKind::kFrozenRandom, 1});
  const auto flat = random_ema(4, 6).flatten();
  const ad::Tensor ema({1, 13, 4}, flat, true);
  const ad::Tensor wrt[] = {ema};
  const auto g = ad::gradients(ad::sum(model.forward(ema)), wrt)[0];
  double norm = 0;
  for (double v : g.data()) norm += v * v;
  EXPECT_GT(norm, 0.0);
  EXPECT_TRUE(model.params().trainable_tensors().empty());
}

TEST(PhysicalModel, ImportForcesFrozen) {
  const PhysicalModel base({PhysicalKind::kFrozenRandom, 2});
  auto weights = base.params().clone();
  weights.set_trainable(true);
  const PhysicalModel imported({PhysicalKind::kFrozenRandom, 2}, weights);
  EXPECT_EQ(imported.params_hash(), base.params_hash());
  EXPECT_THROW(PhysicalModel({PhysicalKind::kSourceFilter, 2}, weights), ContractViolation);
  EXPECT_THROW(PhysicalModel({PhysicalKind::kFrozenRandom, 2}, ModelParams{}), ContractViolation);
}

TEST(PhysicalModel, RejectsBadInput) {
  const PhysicalModel model;
  EXPECT_THROW(model.forward(ad::Tensor::zeros({1, 12, 10})), ContractViolation);
  EXPECT_THROW(model.forward(ad::Tensor::zeros({1, 13, 1})), ContractViolation);
  EXPECT_THROW(parse_physical_kind("vocoder"), ContractViolation);
  EXPECT_EQ(parse_physical_kind("frozen-random"), PhysicalKind::kFrozenRandom);
}

TEST(GlottalPulses, OneImpulsePerPeriod) {
  const auto p = glottal_pulses(16000);
  EXPECT_EQ(std::count(p.begin(), p.end(), 1.0), 120);
  EXPECT_EQ(p[0], 1.0);
}
