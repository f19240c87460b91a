#include "articgan/train/trainer.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "articgan/ad/engine.hpp"
#include "articgan/ad/ops.hpp"
#include "articgan/error.hpp"
#include "articgan/models/critic.hpp"
#include "articgan/models/generator.hpp"

namespace artic {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw FormatError("config: '" + key + "' is not a number: '" + text + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw FormatError("config: '" + key + "' is not a non-negative integer: '" + text + "'");
  }
  return v;
}

double l2_norm(std::span<const ad::Tensor> grads) {
  double acc = 0.0;
  for (const auto& g : grads) {
    for (double v : g.data()) acc += v * v;
  }
  return std::sqrt(acc);
}

AdamConfig adam_config(double lr, const TrainConfig& config) {
  return AdamConfig{lr, config.adam_beta1, config.adam_beta2, 1e-8};
}

ad::Tensor generate_audio(const GanState& state, std::size_t batch, Rng& rng) {
  const auto z = sample_latent(rng, batch);
  return state.physical.forward(generator_forward(state.generator, z));
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw ContractViolation("train config: batch_size must be >= 1");
  if (n_critic < 1) throw ContractViolation("train config: n_critic must be >= 1");
  if (!(gp_lambda >= 0.0)) throw ContractViolation("train config: gp_lambda must be >= 0");
  if (!(lr_generator > 0.0) || !(lr_critic > 0.0)) throw ContractViolation("train config: learning rates must be > 0");
  if (width_divisor < 1) throw ContractViolation("train config: width_divisor must be >= 1");
  if (phase_shuffle_radius < 0) throw ContractViolation("train config: phase_shuffle_radius must be >= 0");
}

std::map<std::string, std::string> TrainConfig::to_map() const {
  return {
      {"batch_size", std::to_string(batch_size)},
      {"total_steps", std::to_string(total_steps)},
      {"n_critic", std::to_string(n_critic)},
      {"gp_lambda", fmt_double(gp_lambda)},
      {"lr_generator", fmt_double(lr_generator)},
      {"lr_critic", fmt_double(lr_critic)},
      {"adam_beta1", fmt_double(adam_beta1)},
      {"adam_beta2", fmt_double(adam_beta2)},
      {"seed", std::to_string(seed)},
      {"physical_kind", std::string(to_string(physical_kind))},
      {"physical_seed", std::to_string(physical_seed)},
      {"checkpoint_every", std::to_string(checkpoint_every)},
      {"width_divisor", std::to_string(width_divisor)},
      {"phase_shuffle_radius", std::to_string(phase_shuffle_radius)},
  };
}

TrainConfig TrainConfig::from_map(const std::map<std::string, std::string>& values) {
  TrainConfig c;
  auto get = [&](const char* key) -> const std::string* {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };
  if (auto v = get("batch_size")) c.batch_size = parse_uint("batch_size", *v);
  if (auto v = get("total_steps")) c.total_steps = parse_uint("total_steps", *v);
  if (auto v = get("n_critic")) c.n_critic = parse_uint("n_critic", *v);
  if (auto v = get("gp_lambda")) c.gp_lambda = parse_double("gp_lambda", *v);
  if (auto v = get("lr_generator")) c.lr_generator = parse_double("lr_generator", *v);
  if (auto v = get("lr_critic")) c.lr_critic = parse_double("lr_critic", *v);
  if (auto v = get("adam_beta1")) c.adam_beta1 = parse_double("adam_beta1", *v);
  if (auto v = get("adam_beta2")) c.adam_beta2 = parse_double("adam_beta2", *v);
  if (auto v = get("seed")) c.seed = parse_uint("seed", *v);
  if (auto v = get("physical_kind")) c.physical_kind = parse_physical_kind(*v);
  if (auto v = get("physical_seed")) c.physical_seed = parse_uint("physical_seed", *v);
  if (auto v = get("checkpoint_every")) c.checkpoint_every = parse_uint("checkpoint_every", *v);
  if (auto v = get("width_divisor")) c.width_divisor = parse_uint("width_divisor", *v);
  if (auto v = get("phase_shuffle_radius")) {
    c.phase_shuffle_radius = static_cast<int>(parse_uint("phase_shuffle_radius", *v));
  }
  c.validate();
  return c;
}

ad::Tensor gp_loss(const CriticFn& critic, const ad::Tensor& real, const ad::Tensor& fake,
                   std::span<const double> eps) {
  if (real.shape() != fake.shape()) {
    throw ContractViolation("gp_loss: real " + ad::to_string(real.shape()) + " and fake " +
                            ad::to_string(fake.shape()) + " differ in shape");
  }
  const auto batch = real.dim(0);
  if (eps.size() != batch) throw ContractViolation("gp_loss: need one interpolation weight per batch item");
  const auto width = real.numel() / batch;
  std::vector<double> mix(real.numel());
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < width; ++i) {
      const auto j = b * width + i;
      mix[j] = eps[b] * real[j] + (1.0 - eps[b]) * fake[j];
    }
  }
  const ad::Tensor x_hat(real.shape(), std::move(mix), true);
  const ad::Tensor scores = critic(x_hat);
  const ad::Tensor input_grad = ad::grad_as_node(ad::sum(scores), x_hat);
  const ad::Tensor excess = ad::add_scalar(ad::row_norm(input_grad), -1.0);
  return ad::mean(ad::mul(excess, excess));
}

CriticStepResult critic_step(GanState& state, const ad::Tensor& real_batch, const TrainConfig& config) {
  const auto batch = real_batch.dim(0);
  ad::Tensor fake;
  {
    ad::NoGradGuard no_grad;
    fake = generate_audio(state, batch, state.rng);
  }
  const PhaseShuffle shuffle{config.phase_shuffle_radius, &state.rng};
  const auto d_real = ad::mean(critic_forward(state.critic, real_batch, shuffle));
  const auto d_fake = ad::mean(critic_forward(state.critic, fake, shuffle));
  std::vector<double> eps(batch);
  for (auto& e : eps) e = state.rng.uniform();
  const auto& critic = state.critic;
  const auto gp = gp_loss([&critic](const ad::Tensor& x) { return critic_forward(critic, x); }, real_batch, fake, eps);
  const auto loss = ad::add(ad::sub(d_fake, d_real), ad::scale(gp, config.gp_lambda));

  CriticStepResult result{loss.item(), gp.item(), d_real.item(), d_fake.item(), 0.0};
  if (!std::isfinite(result.loss)) {
    std::ostringstream os;
    os << "critic loss is not finite (D(real)=" << result.score_real << ", D(fake)=" << result.score_fake
       << ", gp=" << result.gp << ")";
    throw TrainingDiverged(os.str());
  }
  auto params = state.critic.trainable_tensors();
  const auto grads = ad::gradients(loss, params);
  result.grad_norm = l2_norm(grads);
  adam_step(params, grads, state.critic_opt, adam_config(config.lr_critic, config));
  return result;
}

GeneratorStepResult generator_step(GanState& state, const TrainConfig& config) {
  const auto audio = generate_audio(state, config.batch_size, state.rng);
  const PhaseShuffle shuffle{config.phase_shuffle_radius, &state.rng};
  const auto loss = ad::neg(ad::mean(critic_forward(state.critic, audio, shuffle)));
  GeneratorStepResult result{loss.item(), 0.0};
  if (!std::isfinite(result.loss)) throw TrainingDiverged("generator loss is not finite");
  auto params = state.generator.trainable_tensors();
  const auto grads = ad::gradients(loss, params);
  result.grad_norm = l2_norm(grads);
  adam_step(params, grads, state.generator_opt, adam_config(config.lr_generator, config));
  return result;
}

std::string format_metrics_row(const StepMetrics& m) {
  return std::to_string(m.step) + "," + fmt_double(m.critic_loss) + "," + fmt_double(m.gen_loss) + "," +
         fmt_double(m.gp) + "," + fmt_double(m.wasserstein_gap) + "," + fmt_double(m.grad_norm_g) + "," +
         fmt_double(m.grad_norm_d);
}

Trainer::Trainer(TrainConfig config, Dataset dataset)
    : config_(config),
      dataset_(std::move(dataset)),
      state_{init_generator({config.width_divisor, 25}, config.seed ^ 0x67656eULL),
             init_critic({config.width_divisor, 25}, config.seed ^ 0x637269ULL),
             {},
             {},
             PhysicalModel({config.physical_kind, config.physical_seed}),
             Rng(config.seed)} {
  config_.validate();
  dataset_.validate(kAudioLength);
  state_.generator_opt = AdamState::for_params(state_.generator.trainable_tensors());
  state_.critic_opt = AdamState::for_params(state_.critic.trainable_tensors());
}

Trainer::Trainer(const Checkpoint& ckpt, Dataset dataset)
    : config_(TrainConfig::from_map(ckpt.config)),
      dataset_(std::move(dataset)),
      state_{ckpt.extract_params("gen."),
             ckpt.extract_params("critic."),
             {},
             {},
             config_.physical_kind == PhysicalKind::kFrozenRandom
                 ? PhysicalModel({config_.physical_kind, config_.physical_seed}, ckpt.extract_params("phys."))
                 : PhysicalModel({config_.physical_kind, config_.physical_seed}),
             Rng(config_.seed)},
      step_(ckpt.step) {
  dataset_.validate(kAudioLength);
  const auto* g = ckpt.optimizer("generator");
  const auto* d = ckpt.optimizer("critic");
  if (!g || !d) throw FormatError("checkpoint: missing optimizer state");
  state_.generator_opt = g->state;
  state_.critic_opt = d->state;
  if (auto it = ckpt.config.find("rng_state"); it != ckpt.config.end()) state_.rng = Rng::deserialize(it->second);
}

ad::Tensor Trainer::sample_real() {
  std::vector<std::size_t> indices(config_.batch_size);
  for (auto& i : indices) i = static_cast<std::size_t>(state_.rng.uniform_int(0, static_cast<std::int64_t>(dataset_.size()) - 1));
  return dataset_.batch(indices);
}

StepMetrics Trainer::step() {
  StepMetrics m;
  m.step = ++step_;
  try {
    CriticStepResult critic;
    for (std::size_t i = 0; i < config_.n_critic; ++i) critic = critic_step(state_, sample_real(), config_);
    const auto gen = generator_step(state_, config_);
    m.critic_loss = critic.loss;
    m.gp = critic.gp;
    m.wasserstein_gap = critic.wasserstein_gap();
    m.grad_norm_d = critic.grad_norm;
    m.gen_loss = gen.loss;
    m.grad_norm_g = gen.grad_norm;
  } catch (const TrainingDiverged& e) {
    throw TrainingDiverged("step " + std::to_string(m.step) + ": " + e.what());
  }
  return m;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint ckpt;
  ckpt.step = step_;
  ckpt.config = config_.to_map();
  ckpt.config["rng_state"] = state_.rng.serialize();
  ckpt.add_params("gen.", state_.generator);
  ckpt.add_params("critic.", state_.critic);
  ckpt.add_params("phys.", state_.physical.params());
  ckpt.optimizers.push_back({"generator", state_.generator_opt});
  ckpt.optimizers.push_back({"critic", state_.critic_opt});
  return ckpt;
}

Trainer train(const TrainConfig& config, const Dataset& dataset, const TrainSinks& sinks) {
  Trainer trainer(config, dataset);
  if (sinks.metrics) *sinks.metrics << kMetricsHeader << '\n';
  bool saved_last = false;
  for (std::size_t s = 1; s <= config.total_steps; ++s) {
    const auto m = trainer.step();
    if (sinks.metrics) *sinks.metrics << format_metrics_row(m) << '\n';
    if (sinks.on_step) sinks.on_step(m);
    saved_last = config.checkpoint_every > 0 && s % config.checkpoint_every == 0;
    if (saved_last && sinks.on_checkpoint) sinks.on_checkpoint(s, trainer.checkpoint());
  }
  if (!saved_last && sinks.on_checkpoint) sinks.on_checkpoint(trainer.steps_done(), trainer.checkpoint());
  return trainer;
}

}  // namespace artic
