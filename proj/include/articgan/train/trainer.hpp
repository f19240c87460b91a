#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "articgan/ad/tensor.hpp"
#include "articgan/io/checkpoint.hpp"
#include "articgan/io/dataset.hpp"
#include "articgan/models/params.hpp"
#include "articgan/physical/physical_model.hpp"
#include "articgan/rng.hpp"
#include "articgan/train/adam.hpp"

namespace artic {

struct TrainConfig {
  std::size_t batch_size = 8;
  std::size_t total_steps = 2000;
  std::size_t n_critic = 5;
  double gp_lambda = 10.0;
  double lr_generator = 1e-4;
  double lr_critic = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.9;
  std::uint64_t seed = 0;
  PhysicalKind physical_kind = PhysicalKind::kSourceFilter;
  std::uint64_t physical_seed = 0;
  /// Zero disables periodic checkpoints.
  std::size_t checkpoint_every = 500;
  /// Divides generator and critic hidden widths; 1 is the full architecture.
  std::size_t width_divisor = 1;
  int phase_shuffle_radius = 2;

  void validate() const;
  std::map<std::string, std::string> to_map() const;
  static TrainConfig from_map(const std::map<std::string, std::string>& values);
};

/// Critic score function used by the gradient penalty.
using CriticFn = std::function<ad::Tensor(const ad::Tensor& audio)>;

/// Mean over the batch of (||grad_x D(x_hat)||_2 - 1)^2 at
/// x_hat = eps * real + (1 - eps) * fake, one eps per item. The input
/// gradient is built with double backprop, so the result is differentiable
/// w.r.t. whatever parameters `critic` closes over.
ad::Tensor gp_loss(const CriticFn& critic, const ad::Tensor& real, const ad::Tensor& fake,
                   std::span<const double> eps);

struct CriticStepResult {
  double loss = 0.0;
  double gp = 0.0;
  double score_real = 0.0;
  double score_fake = 0.0;
  double grad_norm = 0.0;
  double wasserstein_gap() const { return score_real - score_fake; }
};

struct GeneratorStepResult {
  double loss = 0.0;
  double grad_norm = 0.0;
};

/// Everything a step reads or updates. Physical params are never touched.
struct GanState {
  ModelParams generator;
  ModelParams critic;
  AdamState generator_opt;
  AdamState critic_opt;
  PhysicalModel physical;
  Rng rng;
};

/// loss = mean D(A(G(z))) - mean D(real) + lambda * gp; Adam on the critic only.
CriticStepResult critic_step(GanState& state, const ad::Tensor& real_batch, const TrainConfig& config);

/// loss = -mean D(A(G(z))); Adam on the generator only.
GeneratorStepResult generator_step(GanState& state, const TrainConfig& config);

struct StepMetrics {
  std::size_t step = 0;
  double critic_loss = 0.0;
  double gen_loss = 0.0;
  double gp = 0.0;
  double wasserstein_gap = 0.0;
  double grad_norm_g = 0.0;
  double grad_norm_d = 0.0;
};

inline constexpr const char* kMetricsHeader = "step,critic_loss,gen_loss,gp,wasserstein_gap,grad_norm_g,grad_norm_d";
std::string format_metrics_row(const StepMetrics& m);

/// Owns the GAN state for a run and advances it one training step at a time.
class Trainer {
 public:
  Trainer(TrainConfig config, Dataset dataset);
  /// Resumes from a checkpoint written by checkpoint().
  Trainer(const Checkpoint& ckpt, Dataset dataset);

  /// n_critic critic steps followed by one generator step.
  StepMetrics step();

  Checkpoint checkpoint() const;
  const TrainConfig& config() const { return config_; }
  const GanState& state() const { return state_; }
  GanState& state() { return state_; }
  std::size_t steps_done() const { return step_; }

 private:
  ad::Tensor sample_real();

  TrainConfig config_;
  Dataset dataset_;
  GanState state_;
  std::size_t step_ = 0;
};

struct TrainSinks {
  std::ostream* metrics = nullptr;
  std::function<void(std::size_t step, const Checkpoint&)> on_checkpoint;
  std::function<void(const StepMetrics&)> on_step;
};

/// Runs config.total_steps steps, writing one CSV row per step and handing a
/// checkpoint to the sink every checkpoint_every steps and after the last.
Trainer train(const TrainConfig& config, const Dataset& dataset, const TrainSinks& sinks);

}  // namespace artic
