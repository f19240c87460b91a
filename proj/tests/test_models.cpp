#include <gtest/gtest.h>

#include <cmath>

#include "articgan/ad/ops.hpp"
#include "articgan/error.hpp"
#include "articgan/models/critic.hpp"
#include "articgan/models/generator.hpp"

using namespace artic;

TEST(Generator, LayerShapesAtFullWidth) {
  const auto params = init_generator({}, 0);
  Rng rng(0);
  ActivationTrace trace;
  const auto out = generator_forward(params, sample_latent(rng, 1), &trace);
  const std::vector<std::array<std::size_t, 2>> expect = {{512, 32}, {512, 64}, {256, 128}, {256, 128}, {13, 256}};
  EXPECT_EQ(trace.layers, expect);
  EXPECT_EQ(out.shape(), ad::Shape({1, 13, 256}));
  for (double v : out.data()) EXPECT_LE(std::abs(v), 1.0);
}

TEST(Generator, WidthDivisorKeepsLengthsAndOutputChannels) {
  const auto params = init_generator({16, 25}, 3);
  EXPECT_EQ(generator_width_divisor(params), 16u);
  Rng rng(0);
  ActivationTrace trace;
  const auto out = generator_forward(params, sample_latent(rng, 2), &trace);
  EXPECT_EQ(out.shape(), ad::Shape({2, 13, 256}));
  EXPECT_EQ(trace.layers[0], (std::array<std::size_t, 2>{32, 32}));
}

TEST(Generator, InitIsSeededAndBounded) {
  const auto a = init_generator({8, 25}, 11);
  const auto b = init_generator({8, 25}, 11);
  const auto c = init_generator({8, 25}, 12);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  const auto& k = a.at("up1.k");
  const double bound = 1.0 / std::sqrt(static_cast<double>(k.dim(0) * 25) / 2.0);
  for (double v : k.data()) EXPECT_LE(std::abs(v), bound);
  for (double v : a.at("up1.b").data()) EXPECT_EQ(v, 0.0);
}

TEST(Generator, RejectsWrongLatent) {
  const auto params = init_generator({32, 25}, 0);
  EXPECT_THROW(generator_forward(params, ad::Tensor::zeros({1, 99})), ContractViolation);
}

TEST(Critic, ScoresShape) {
  const auto params = init_critic({32, 25}, 0);
  Rng rng(1);
  const auto audio = ad::Tensor::zeros({3, 1, kAudioLength});
  const auto scores = critic_forward(params, audio, PhaseShuffle{2, &rng});
  EXPECT_EQ(scores.shape(), ad::Shape({3, 1}));
  EXPECT_EQ(critic_width_divisor(params), 32u);
  EXPECT_THROW(critic_forward(params, ad::Tensor::zeros({1, 1, 1000})), ContractViolation);
}

TEST(Critic, ZeroWeightsScoreZero) {
  auto params = init_critic({64, 25}, 0);
  for (const auto& p : params.entries()) {
    for (auto& v : params.at(p.name).mutable_data()) v = 0.0;
  }
  Rng rng(2);
  std::vector<double> x(kAudioLength);
  for (auto& v : x) v = rng.uniform(-1, 1);
  const auto s = critic_forward(params, ad::Tensor({1, 1, kAudioLength}, x));
  EXPECT_EQ(s.item(), 0.0);
}

TEST(PhaseShuffle, ReflectsAtEdges) {
  const auto x = ad::Tensor::from({1, 1, 5}, {0, 1, 2, 3, 4});
  const auto right = phase_shuffle(x, 2);
  EXPECT_EQ(std::vector<double>(right.data().begin(), right.data().end()), (std::vector<double>{2, 3, 4, 3, 2}));
  const auto left = phase_shuffle(x, -2);
  EXPECT_EQ(std::vector<double>(left.data().begin(), left.data().end()), (std::vector<double>{2, 1, 0, 1, 2}));
  EXPECT_EQ(phase_shuffle(x, 0)[3], 3.0);
}

TEST(PhaseShuffle, RadiusBounds) {
  const auto x = ad::Tensor::zeros({1, 1, 3});
  Rng rng(0);
  EXPECT_THROW(phase_shuffle(x, 3, rng), ContractViolation);
  EXPECT_THROW(phase_shuffle(x, -1, rng), ContractViolation);
}
