#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "articgan/ad/engine.hpp"
#include "articgan/ad/ops.hpp"
#include "articgan/error.hpp"
#include "articgan/models/critic.hpp"
#include "articgan/models/generator.hpp"
#include "articgan/train/synthetic.hpp"
#include "articgan/train/trainer.hpp"

using namespace artic;

namespace {

constexpr std::size_t kDesk = 64;

GanState small_state(std::uint64_t seed, PhysicalKind kind = PhysicalKind::kSourceFilter) {
  GanState s{init_generator({kDesk, 25}, seed), init_critic({kDesk, 25}, seed + 1), {}, {},
             PhysicalModel({kind, 0}), Rng(seed)};
  s.generator_opt = AdamState::for_params(s.generator.trainable_tensors());
  s.critic_opt = AdamState::for_params(s.critic.trainable_tensors());
  return s;
}

void zero_all(ModelParams& params) {
  for (const auto& p : params.entries()) {
    for (auto& v : params.at(p.name).mutable_data()) v = 0.0;
  }
}

const Dataset& toy() {
  static const Dataset ds = synthetic_dataset();
  return ds;
}

TrainConfig small_config(std::size_t steps) {
  TrainConfig c;
  c.batch_size = 1;
  c.total_steps = steps;
  c.width_divisor = kDesk;
  c.checkpoint_every = 0;
  c.seed = 42;
  return c;
}

// Linear critic D(x) = <x, w> on flattened audio.
struct LinearCritic {
  ad::Tensor w;
  ad::Tensor operator()(const ad::Tensor& x) const {
    const auto flat = ad::reshape(x, {x.dim(0), x.numel() / x.dim(0)});
    return ad::matmul(flat, w);
  }
};

ad::Tensor weight_with_norm(std::size_t n, double norm, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(n);
  double ss = 0;
  for (auto& v : w) {
    v = rng.uniform(-1, 1);
    ss += v * v;
  }
  for (auto& v : w) v *= norm / std::sqrt(ss);
  return ad::Tensor({n, 1}, w, true);
}

}  // namespace

TEST(GradientPenalty, LinearCriticNormFive) {
  const auto w = weight_with_norm(40, 5.0, 1);
  Rng rng(2);
  std::vector<double> a(80), b(80);
  for (auto& v : a) v = rng.uniform(-1, 1);
  for (auto& v : b) v = rng.uniform(-1, 1);
  const double eps[] = {0.1, 0.8};
  const auto gp = gp_loss(LinearCritic{w}, ad::Tensor({2, 1, 40}, a), ad::Tensor({2, 1, 40}, b), eps);
  EXPECT_NEAR(gp.item(), 16.0, 1e-9);
  const ad::Tensor wrt[] = {w};
  const auto g = ad::gradients(ad::scale(gp, 10.0), wrt)[0];
  for (std::size_t i = 0; i < 40; ++i) EXPECT_NEAR(g[i], 2.0 * 10.0 * 4.0 * w[i] / 5.0, 1e-6);
}

TEST(GradientPenalty, UnitNormIsZero) {
  const auto w = weight_with_norm(10, 1.0, 3);
  const auto x = ad::Tensor::full({1, 1, 10}, 0.3);
  const double eps[] = {0.5};
  EXPECT_NEAR(gp_loss(LinearCritic{w}, x, ad::Tensor::zeros({1, 1, 10}), eps).item(), 0.0, 1e-20);
}

TEST(GradientPenalty, RejectsShapeMismatch) {
  const auto w = weight_with_norm(10, 1.0, 3);
  const double eps[] = {0.5};
  EXPECT_THROW(gp_loss(LinearCritic{w}, ad::Tensor::zeros({1, 1, 10}), ad::Tensor::zeros({1, 1, 9}), eps),
               ContractViolation);
  const double two[] = {0.5, 0.5};
  EXPECT_THROW(gp_loss(LinearCritic{w}, ad::Tensor::zeros({1, 1, 10}), ad::Tensor::zeros({1, 1, 10}), two),
               ContractViolation);
}

TEST(CriticStep, ZeroCriticLossIsLambda) {
  auto s = small_state(1);
  zero_all(s.critic);
  const auto r = critic_step(s, toy().batch({0, 1}), small_config(1));
  EXPECT_EQ(r.score_real, 0.0);
  EXPECT_EQ(r.score_fake, 0.0);
  EXPECT_DOUBLE_EQ(r.gp, 1.0);
  EXPECT_DOUBLE_EQ(r.loss, 10.0);
}

TEST(CriticStep, UpdatesOnlyCritic) {
  for (auto kind : {PhysicalKind::kSourceFilter, PhysicalKind::kFrozenRandom}) {
    auto s = small_state(2, kind);
    const auto g0 = s.generator.hash(), d0 = s.critic.hash(), p0 = s.physical.params_hash();
    critic_step(s, toy().batch({3}), small_config(1));
    EXPECT_EQ(s.generator.hash(), g0);
    EXPECT_EQ(s.physical.params_hash(), p0);
    EXPECT_NE(s.critic.hash(), d0);
    EXPECT_EQ(s.critic_opt.step, 1u);
    EXPECT_EQ(s.generator_opt.step, 0u);
  }
}

TEST(GeneratorStep, ZeroCriticLeavesGeneratorUnchanged) {
  auto s = small_state(3);
  zero_all(s.critic);
  const auto g0 = s.generator.hash();
  const auto r = generator_step(s, small_config(1));
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.grad_norm, 0.0);
  EXPECT_EQ(s.generator.hash(), g0);
}

TEST(GeneratorStep, UpdatesOnlyGenerator) {
  auto s = small_state(4);
  const auto g0 = s.generator.hash(), d0 = s.critic.hash(), p0 = s.physical.params_hash();
  const auto r = generator_step(s, small_config(1));
  EXPECT_GT(r.grad_norm, 0.0);
  EXPECT_NE(s.generator.hash(), g0);
  EXPECT_EQ(s.critic.hash(), d0);
  EXPECT_EQ(s.physical.params_hash(), p0);
}

// A critic scoring waveform energy: one Adam step on -D(A(G(z))) raises the energy.
TEST(GeneratorStep, EnergyCriticGradientIncreasesEnergy) {
  auto gen = init_generator({kDesk, 25}, 5);
  const PhysicalModel phys;
  Rng rng(6);
  const auto z = sample_latent(rng, 2);
  auto loss_of = [&](const ModelParams& p) {
    const auto audio = phys.forward(generator_forward(p, z));
    return ad::neg(ad::mean(ad::mul(audio, audio)));
  };
  const auto before = loss_of(gen);
  auto params = gen.trainable_tensors();
  const auto grads = ad::gradients(before, params);
  double norm = 0;
  for (const auto& g : grads)
    for (double v : g.data()) norm += v * v;
  ASSERT_GT(norm, 0.0);
  auto state = AdamState::for_params(params);
  adam_step(params, grads, state, AdamConfig{1e-4, 0.5, 0.9, 1e-8});
  EXPECT_LT(loss_of(gen).item(), before.item());
}

TEST(CriticStep, NanAbortsWithDiagnostic) {
  auto s = small_state(7);
  s.critic.at("out.b").mutable_data()[0] = std::numeric_limits<double>::quiet_NaN();
  try {
    critic_step(s, toy().batch({0}), small_config(1));
    FAIL() << "expected TrainingDiverged";
  } catch (const TrainingDiverged& e) {
    EXPECT_NE(std::string(e.what()).find("gp="), std::string::npos);
  }
}

TEST(Adam, FirstStepMovesByLearningRate) {
  auto p = ad::Tensor::from({3}, {1.0, -2.0, 0.5}, true);
  const auto g = ad::Tensor::from({3}, {3.0, -0.02, 1e3});
  ad::Tensor params[] = {p};
  const ad::Tensor grads[] = {g};
  auto state = AdamState::for_params(params);
  adam_step(params, grads, state, AdamConfig{1e-3, 0.5, 0.9, 1e-8});
  EXPECT_NEAR(p[0], 1.0 - 1e-3, 1e-6);
  EXPECT_NEAR(p[1], -2.0 + 1e-3, 1e-6);
  EXPECT_NEAR(p[2], 0.5 - 1e-3, 1e-6);
}

TEST(Adam, ZeroGradientKeepsParamsAndDecaysMoments) {
  auto p = ad::Tensor::from({1}, {1.0}, true);
  ad::Tensor params[] = {p};
  auto state = AdamState::for_params(params);
  const ad::Tensor g1[] = {ad::Tensor::from({1}, {2.0})};
  adam_step(params, g1, state, {});
  const double value = p[0], m = state.m[0][0], v = state.v[0][0];
  const ad::Tensor g0[] = {ad::Tensor::from({1}, {0.0})};
  AdamState zero_state = AdamState::for_params(params);
  adam_step(params, g0, zero_state, {});
  EXPECT_EQ(p[0], value);
  adam_step(params, g0, state, {});
  EXPECT_DOUBLE_EQ(state.m[0][0], 0.5 * m);
  EXPECT_DOUBLE_EQ(state.v[0][0], 0.9 * v);
}

TEST(Adam, BiasCorrectedSecondMomentAfterTwoSteps) {
  auto p = ad::Tensor::from({2}, {0.0, 0.0}, true);
  ad::Tensor params[] = {p};
  const ad::Tensor g[] = {ad::Tensor::from({2}, {0.7, -3.0})};
  auto state = AdamState::for_params(params);
  adam_step(params, g, state, {});
  adam_step(params, g, state, {});
  // v_2 = (1 - b2) * g^2 * (b2 + 1) and 1 - b2^2 = (1 - b2)(1 + b2).
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(state.v[0][i] / (1.0 - 0.9 * 0.9), g[0][i] * g[0][i], 1e-12);
    EXPECT_NEAR(state.m[0][i] / (1.0 - 0.5 * 0.5), g[0][i], 1e-12);
  }
  EXPECT_EQ(state.step, 2u);
}

TEST(TrainConfig, MapRoundTripAndValidation) {
  TrainConfig c;
  c.batch_size = 3;
  c.gp_lambda = 0.125;
  c.physical_kind = PhysicalKind::kFrozenRandom;
  c.width_divisor = 8;
  const auto back = TrainConfig::from_map(c.to_map());
  EXPECT_EQ(back.to_map(), c.to_map());
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ContractViolation);
  c.batch_size = 1;
  c.n_critic = 0;
  EXPECT_THROW(c.validate(), ContractViolation);
  c.n_critic = 1;
  c.gp_lambda = -1;
  EXPECT_THROW(c.validate(), ContractViolation);
  EXPECT_THROW(TrainConfig::from_map({{"batch_size", "x"}}), FormatError);
}

TEST(Train, MetricsRowPerStepAndDeterministic) {
  auto run = [] {
    std::ostringstream metrics;
    std::vector<std::string> ckpts;
    TrainSinks sinks;
    sinks.metrics = &metrics;
    sinks.on_checkpoint = [&](std::size_t, const Checkpoint& c) { ckpts.push_back(checkpoint_serialize(c)); };
    train(small_config(2), toy(), sinks);
    return std::make_pair(metrics.str(), ckpts);
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  ASSERT_EQ(a.second.size(), 1u);
  std::istringstream lines(a.first);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, kMetricsHeader);
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 2u);
}

TEST(Train, PeriodicCheckpoints) {
  auto config = small_config(3);
  config.checkpoint_every = 2;
  std::vector<std::size_t> steps;
  TrainSinks sinks;
  sinks.on_checkpoint = [&](std::size_t step, const Checkpoint& c) {
    EXPECT_EQ(c.step, step);
    steps.push_back(step);
  };
  train(config, toy(), sinks);
  EXPECT_EQ(steps, (std::vector<std::size_t>{2, 3}));
}

TEST(Train, ResumeMatchesUninterruptedRun) {
  Trainer full(small_config(4), toy());
  for (int i = 0; i < 4; ++i) full.step();

  Trainer first(small_config(4), toy());
  first.step();
  first.step();
  const auto saved = checkpoint_parse(checkpoint_serialize(first.checkpoint()));
  Trainer resumed(saved, toy());
  resumed.step();
  resumed.step();
  EXPECT_EQ(checkpoint_serialize(resumed.checkpoint()), checkpoint_serialize(full.checkpoint()));
}

TEST(Train, FrozenPhysicalSurvivesCheckpoint) {
  auto config = small_config(1);
  config.physical_kind = PhysicalKind::kFrozenRandom;
  Trainer t(config, toy());
  t.step();
  const auto hash = t.state().physical.params_hash();
  const auto ckpt = checkpoint_parse(checkpoint_serialize(t.checkpoint()));
  for (const auto& nt : ckpt.tensors) {
    if (nt.name.starts_with("phys.")) {
      EXPECT_FALSE(nt.trainable);
    }
  }
  Trainer resumed(ckpt, toy());
  EXPECT_EQ(resumed.state().physical.params_hash(), hash);
}

TEST(Train, RejectsWrongLengthDataset) {
  Dataset bad;
  bad.names = {"short.wav"};
  bad.items = {std::vector<double>(100, 0.0)};
  EXPECT_THROW(Trainer(small_config(1), bad), FormatError);
}
