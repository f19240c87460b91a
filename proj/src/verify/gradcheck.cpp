#include "articgan/verify/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "articgan/ad/engine.hpp"
#include "articgan/ad/ops.hpp"
#include "articgan/error.hpp"
#include "articgan/models/critic.hpp"
#include "articgan/models/generator.hpp"
#include "articgan/physical/physical_model.hpp"
#include "articgan/rng.hpp"
#include "articgan/train/trainer.hpp"

namespace artic::verify {

namespace {

using ad::Shape;
using ad::Tensor;
using Fn = std::function<Tensor(const std::vector<Tensor>&)>;

constexpr double kPrimitiveStep = 1e-5;
constexpr double kCompositeStep = 1e-7;
constexpr std::size_t kCompositeWidthDivisor = 64;
// Largest relative disagreement between the h and h/2 quotients on a smooth piece.
constexpr double kSmoothness = 1e-5;

Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(ad::numel(shape));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return Tensor(std::move(shape), std::move(v));
}

// Magnitudes in [lo, hi] with random sign, away from kinks and poles at zero.
Tensor away_from_zero(Rng& rng, Shape shape, double lo, double hi) {
  std::vector<double> v(ad::numel(shape));
  for (auto& x : v) x = rng.uniform(lo, hi) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
  return Tensor(std::move(shape), std::move(v));
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
}

std::vector<Tensor> as_leaves(const std::vector<Tensor>& values) {
  std::vector<Tensor> out;
  for (const auto& v : values) out.push_back(Tensor(v.shape(), {v.data().begin(), v.data().end()}, true));
  return out;
}

// Scalar objective sum(r * f(x)) with a fixed random projection r.
struct Objective {
  Fn f;
  Tensor projection;

  Tensor operator()(const std::vector<Tensor>& x) const {
    const auto out = f(x);
    if (out.numel() == 1 && !projection.defined()) return ad::reshape(out, {1});
    return ad::sum(ad::mul(out, projection));
  }
};

Objective make_objective(Fn f, const std::vector<Tensor>& inputs, Rng& rng) {
  Tensor sample;
  {
    ad::NoGradGuard no_grad;
    sample = f(inputs);
  }
  return Objective{std::move(f), random_tensor(rng, sample.shape())};
}

double evaluate(const Objective& obj, const std::vector<Tensor>& x) { return obj(as_leaves(x)).item(); }

// Element-wise central differences over every input entry.
double elementwise_error(const Objective& obj, const std::vector<Tensor>& inputs, double step) {
  const auto leaves = as_leaves(inputs);
  const auto grads = ad::gradients(obj(leaves), leaves);
  std::vector<double> analytic;
  std::vector<double> numeric;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (double g : grads[k].data()) analytic.push_back(g);
    for (std::size_t i = 0; i < inputs[k].numel(); ++i) {
      auto shifted = inputs;
      std::vector<double> v(inputs[k].data().begin(), inputs[k].data().end());
      const double x0 = v[i];
      v[i] = x0 + step;
      shifted[k] = Tensor(inputs[k].shape(), v);
      const double up = evaluate(obj, shifted);
      v[i] = x0 - step;
      shifted[k] = Tensor(inputs[k].shape(), v);
      const double down = evaluate(obj, shifted);
      numeric.push_back((up - down) / (2.0 * step));
    }
  }
  return relative_error(analytic, numeric);
}

// Central difference along a random direction through all inputs. ReLU-type
// masks make the critic input gradient (and so gp_loss) jump where an
// activation changes sign; a direction whose h and h/2 difference quotients
// disagree straddles such a point and is redrawn. Returns nullopt when no
// smooth direction was found, i.e. the point itself sits on a kink.
std::optional<double> directional_error(const Objective& obj, const std::vector<Tensor>& inputs, Rng& rng, double step,
                                        std::size_t& redraws) {
  const auto leaves = as_leaves(inputs);
  const auto grads = ad::gradients(obj(leaves), leaves);
  for (int attempt = 0; attempt < 5; ++attempt) {
    std::vector<Tensor> dir;
    double analytic = 0.0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      dir.push_back(random_tensor(rng, inputs[k].shape()));
      for (std::size_t i = 0; i < inputs[k].numel(); ++i) analytic += grads[k][i] * dir[k][i];
    }
    auto moved = [&](double t) {
      std::vector<Tensor> out;
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        std::vector<double> v(inputs[k].numel());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = inputs[k][i] + t * dir[k][i];
        out.push_back(Tensor(inputs[k].shape(), std::move(v)));
      }
      return out;
    };
    auto quotient = [&](double h) { return (evaluate(obj, moved(h)) - evaluate(obj, moved(-h))) / (2.0 * h); };
    const double coarse = quotient(step);
    const double fine = quotient(0.5 * step);
    if (std::abs(coarse - fine) > kSmoothness * std::max({std::abs(coarse), std::abs(fine), 1e-8})) {
      ++redraws;
      continue;
    }
    const double a[] = {analytic};
    const double n[] = {fine};
    return relative_error(a, n);
  }
  return std::nullopt;
}

// Wraps f so the result is sum(s * d/dx sum(r * f(x))), built by double backprop.
Fn second_order(Fn f, const std::vector<Tensor>& inputs, Rng& rng) {
  auto inner = std::make_shared<Objective>(make_objective(f, inputs, rng));
  auto weights = std::make_shared<std::vector<Tensor>>();
  for (const auto& x : inputs) weights->push_back(random_tensor(rng, x.shape()));
  return [inner, weights](const std::vector<Tensor>& x) {
    const auto grads = ad::gradients((*inner)(x), x, true);
    Tensor total = ad::sum(ad::mul(grads[0], (*weights)[0]));
    for (std::size_t k = 1; k < grads.size(); ++k) total = ad::add(total, ad::sum(ad::mul(grads[k], (*weights)[k])));
    return total;
  };
}

struct Instance {
  Fn f;
  std::vector<Tensor> inputs;
};

using Generator = std::function<Instance(Rng&)>;

struct PrimitiveCase {
  std::string name;
  Generator make;
};

std::vector<PrimitiveCase> primitive_cases() {
  std::vector<PrimitiveCase> cases;
  auto small_shape = [](Rng& rng) { return Shape{pick(rng, 1, 3), pick(rng, 1, 4)}; };

  cases.push_back({"add", [=](Rng& rng) {
                     const auto s = small_shape(rng);
                     return Instance{[](const auto& x) { return ad::add(x[0], x[1]); },
                                     {random_tensor(rng, s), random_tensor(rng, s)}};
                   }});
  cases.push_back({"sub", [=](Rng& rng) {
                     const auto s = small_shape(rng);
                     return Instance{[](const auto& x) { return ad::sub(x[0], x[1]); },
                                     {random_tensor(rng, s), random_tensor(rng, s)}};
                   }});
  cases.push_back({"mul", [=](Rng& rng) {
                     const auto s = small_shape(rng);
                     return Instance{[](const auto& x) { return ad::mul(x[0], x[1]); },
                                     {random_tensor(rng, s), random_tensor(rng, s)}};
                   }});
  cases.push_back({"safe_div", [=](Rng& rng) {
                     const auto s = small_shape(rng);
                     return Instance{[](const auto& x) { return ad::safe_div(x[0], x[1]); },
                                     {random_tensor(rng, s), away_from_zero(rng, s, 0.5, 1.5)}};
                   }});
  cases.push_back({"scale", [=](Rng& rng) {
                     const double c = rng.uniform(-2.0, 2.0);
                     return Instance{[c](const auto& x) { return ad::scale(x[0], c); }, {random_tensor(rng, small_shape(rng))}};
                   }});
  cases.push_back({"add_scalar", [=](Rng& rng) {
                     const double c = rng.uniform(-2.0, 2.0);
                     return Instance{[c](const auto& x) { return ad::add_scalar(x[0], c); },
                                     {random_tensor(rng, small_shape(rng))}};
                   }});
  cases.push_back({"sum", [=](Rng& rng) {
                     return Instance{[](const auto& x) { return ad::sum(x[0]); }, {random_tensor(rng, small_shape(rng))}};
                   }});
  cases.push_back({"mean", [=](Rng& rng) {
                     return Instance{[](const auto& x) { return ad::mean(x[0]); }, {random_tensor(rng, small_shape(rng))}};
                   }});
  cases.push_back({"expand_scalar", [=](Rng& rng) {
                     const auto s = small_shape(rng);
                     return Instance{[s](const auto& x) { return ad::expand_scalar(x[0], s); }, {random_tensor(rng, {1})}};
                   }});
  cases.push_back({"tanh", [=](Rng& rng) {
                     return Instance{[](const auto& x) { return ad::tanh(x[0]); },
                                     {random_tensor(rng, small_shape(rng), -2.0, 2.0)}};
                   }});
  cases.push_back({"leaky_relu", [=](Rng& rng) {
                     const double alpha = rng.uniform(0.0, 1.0);
                     return Instance{[alpha](const auto& x) { return ad::leaky_relu(x[0], alpha); },
                                     {away_from_zero(rng, small_shape(rng), 0.05, 1.0)}};
                   }});
  cases.push_back({"reshape", [=](Rng& rng) {
                     const auto s = small_shape(rng);
                     return Instance{[s](const auto& x) { return ad::reshape(x[0], {s[1], s[0]}); }, {random_tensor(rng, s)}};
                   }});
  cases.push_back({"matmul", [=](Rng& rng) {
                     const auto m = pick(rng, 1, 3), k = pick(rng, 1, 4), n = pick(rng, 1, 3);
                     return Instance{[](const auto& x) { return ad::matmul(x[0], x[1]); },
                                     {random_tensor(rng, {m, k}), random_tensor(rng, {k, n})}};
                   }});
  cases.push_back({"transpose", [=](Rng& rng) {
                     return Instance{[](const auto& x) { return ad::transpose(x[0]); }, {random_tensor(rng, small_shape(rng))}};
                   }});
  cases.push_back({"expand_axis", [=](Rng& rng) {
                     const Shape s{pick(rng, 1, 3), pick(rng, 1, 3), pick(rng, 1, 3)};
                     const auto axis = pick(rng, 0, 2);
                     return Instance{[s, axis](const auto& x) { return ad::expand_axis(x[0], s, axis); },
                                     {random_tensor(rng, {s[axis]})}};
                   }});
  cases.push_back({"sum_to_axis", [=](Rng& rng) {
                     const Shape s{pick(rng, 1, 3), pick(rng, 1, 3), pick(rng, 1, 3)};
                     const auto axis = pick(rng, 0, 2);
                     return Instance{[axis](const auto& x) { return ad::sum_to_axis(x[0], axis); }, {random_tensor(rng, s)}};
                   }});
  cases.push_back({"dense", [=](Rng& rng) {
                     const auto b = pick(rng, 1, 3), i = pick(rng, 1, 4), o = pick(rng, 1, 3);
                     return Instance{[](const auto& x) { return ad::dense(x[0], x[1], x[2]); },
                                     {random_tensor(rng, {b, i}), random_tensor(rng, {i, o}), random_tensor(rng, {o})}};
                   }});
  cases.push_back({"add_channel_bias", [=](Rng& rng) {
                     const auto b = pick(rng, 1, 2), c = pick(rng, 1, 3), l = pick(rng, 1, 4);
                     return Instance{[](const auto& x) { return ad::add_channel_bias(x[0], x[1]); },
                                     {random_tensor(rng, {b, c, l}), random_tensor(rng, {c})}};
                   }});
  cases.push_back({"conv1d", [=](Rng& rng) {
                     const auto b = pick(rng, 1, 2), c = pick(rng, 1, 3), f = pick(rng, 1, 3);
                     const auto k = pick(rng, 1, 4), stride = pick(rng, 1, 3), l = k + pick(rng, 0, 6);
                     return Instance{[stride](const auto& x) { return ad::conv1d(x[0], x[1], stride); },
                                     {random_tensor(rng, {b, c, l}), random_tensor(rng, {f, c, k})}};
                   }});
  cases.push_back({"conv1d_input_grad", [=](Rng& rng) {
                     const auto b = pick(rng, 1, 2), c = pick(rng, 1, 3), f = pick(rng, 1, 3);
                     const auto k = pick(rng, 1, 4), stride = pick(rng, 1, 3), lo = pick(rng, 1, 4);
                     const auto length = (lo - 1) * stride + k + pick(rng, 0, stride - 1);
                     return Instance{[stride, length](const auto& x) { return ad::conv1d_input_grad(x[0], x[1], stride, length); },
                                     {random_tensor(rng, {b, f, lo}), random_tensor(rng, {f, c, k})}};
                   }});
  cases.push_back({"conv1d_kernel_grad", [=](Rng& rng) {
                     const auto b = pick(rng, 1, 2), c = pick(rng, 1, 3), f = pick(rng, 1, 3);
                     const auto k = pick(rng, 1, 4), stride = pick(rng, 1, 3), l = k + pick(rng, 0, 6);
                     const auto lo = (l - k) / stride + 1;
                     return Instance{[stride, k](const auto& x) { return ad::conv1d_kernel_grad(x[0], x[1], stride, k); },
                                     {random_tensor(rng, {b, c, l}), random_tensor(rng, {b, f, lo})}};
                   }});
  cases.push_back({"conv1d_transpose_raw", [=](Rng& rng) {
                     const auto b = pick(rng, 1, 2), c = pick(rng, 1, 3), f = pick(rng, 1, 3);
                     const auto k = pick(rng, 1, 5), stride = pick(rng, 1, 3), l = pick(rng, 1, 4);
                     return Instance{[stride](const auto& x) { return ad::conv1d_transpose_raw(x[0], x[1], stride); },
                                     {random_tensor(rng, {b, c, l}), random_tensor(rng, {c, f, k})}};
                   }});
  cases.push_back({"conv1d_transpose", [=](Rng& rng) {
                     const auto b = pick(rng, 1, 2), c = pick(rng, 1, 3), f = pick(rng, 1, 3);
                     const auto k = pick(rng, 1, 6), stride = pick(rng, 1, 3), l = pick(rng, 1, 4);
                     return Instance{[stride](const auto& x) { return ad::conv1d_transpose(x[0], x[1], stride); },
                                     {random_tensor(rng, {b, c, l}), random_tensor(rng, {c, f, k})}};
                   }});
  cases.push_back({"conv1d_same", [=](Rng& rng) {
                     const auto b = pick(rng, 1, 2), c = pick(rng, 1, 3), f = pick(rng, 1, 3);
                     const auto k = pick(rng, 1, 6), stride = pick(rng, 1, 3), l = pick(rng, 1, 8);
                     return Instance{[stride](const auto& x) { return ad::conv1d_same(x[0], x[1], stride); },
                                     {random_tensor(rng, {b, c, l}), random_tensor(rng, {f, c, k})}};
                   }});
  cases.push_back({"window_last", [=](Rng& rng) {
                     const auto l = pick(rng, 1, 6);
                     const auto offset = static_cast<std::ptrdiff_t>(rng.uniform_int(-3, 3));
                     const auto length = pick(rng, 1, 8);
                     return Instance{[offset, length](const auto& x) { return ad::window_last(x[0], offset, length); },
                                     {random_tensor(rng, {pick(rng, 1, 2), l})}};
                   }});
  cases.push_back({"gather_last", [=](Rng& rng) {
                     const auto l = pick(rng, 1, 5);
                     std::vector<std::size_t> index(pick(rng, 1, 7));
                     for (auto& i : index) i = pick(rng, 0, l - 1);
                     return Instance{[index](const auto& x) { return ad::gather_last(x[0], index); },
                                     {random_tensor(rng, {pick(rng, 1, 2), l})}};
                   }});
  cases.push_back({"scatter_last", [=](Rng& rng) {
                     const auto length = pick(rng, 1, 5);
                     std::vector<std::size_t> index(pick(rng, 1, 7));
                     for (auto& i : index) i = pick(rng, 0, length - 1);
                     return Instance{[index, length](const auto& x) { return ad::scatter_last(x[0], index, length); },
                                     {random_tensor(rng, {pick(rng, 1, 2), index.size()})}};
                   }});
  cases.push_back({"row_norm", [=](Rng& rng) {
                     return Instance{[](const auto& x) { return ad::row_norm(x[0]); },
                                     {away_from_zero(rng, {pick(rng, 1, 3), pick(rng, 2, 4)}, 0.2, 1.0)}};
                   }});
  cases.push_back({"phase_shuffle", [=](Rng& rng) {
                     const auto l = pick(rng, 3, 8);
                     const int shift = static_cast<int>(rng.uniform_int(-2, 2));
                     return Instance{[shift](const auto& x) { return phase_shuffle(x[0], shift); },
                                     {random_tensor(rng, {pick(rng, 1, 2), pick(rng, 1, 2), l})}};
                   }});
  return cases;
}

void record(CheckResult& check, double err) {
  ++check.instances;
  check.max_rel_error =
      std::isfinite(err) ? std::max(check.max_rel_error, err) : std::numeric_limits<double>::infinity();
}

SuiteReport autodiff_suite(std::size_t trials, std::uint64_t seed) {
  SuiteReport report{"autodiff", {}};
  for (const auto& pc : primitive_cases()) {
    CheckResult first{pc.name, 0, 0.0, kPrimitiveTolerance};
    CheckResult second{pc.name + " (second order)", 0, 0.0, kCompositeTolerance};
    Rng rng(seed ^ std::hash<std::string>{}(pc.name));
    for (std::size_t t = 0; t < trials; ++t) {
      const auto inst = pc.make(rng);
      record(first, elementwise_error(make_objective(inst.f, inst.inputs, rng), inst.inputs, kPrimitiveStep));
      const auto f2 = second_order(inst.f, inst.inputs, rng);
      record(second, elementwise_error(Objective{f2, Tensor()}, inst.inputs, kPrimitiveStep));
    }
    report.checks.push_back(first);
    report.checks.push_back(second);
  }
  return report;
}

SuiteReport generator_suite(std::size_t trials, std::uint64_t seed) {
  SuiteReport report{"generator", {}};
  CheckResult check{"generator", 0, 0.0, kCompositeTolerance};
  Rng rng(seed);
  for (std::size_t attempt = 0; check.instances < trials && attempt < 4 * trials; ++attempt) {
    const auto params = init_generator({kCompositeWidthDivisor, 25}, rng.next_u64());
    std::vector<std::string> names;
    std::vector<Tensor> inputs;
    for (const auto& p : params.entries()) {
      names.push_back(p.name);
      // Random biases so the check also covers the bias path.
      inputs.push_back(p.name.ends_with(".b") ? random_tensor(rng, p.value.shape(), -0.1, 0.1) : p.value.detach());
    }
    inputs.push_back(sample_latent(rng, pick(rng, 1, 2)));
    Fn f = [names](const std::vector<Tensor>& x) {
      ModelParams p;
      for (std::size_t i = 0; i < names.size(); ++i) p.add(names[i], x[i], true);
      return generator_forward(p, x.back());
    };
    if (const auto err = directional_error(make_objective(f, inputs, rng), inputs, rng, kCompositeStep, check.redraws)) record(check, *err);
  }
  if (check.instances < trials) check.max_rel_error = std::numeric_limits<double>::infinity();
  report.checks.push_back(check);
  return report;
}

std::pair<std::vector<std::string>, std::vector<Tensor>> critic_inputs(Rng& rng) {
  const auto params = init_critic({kCompositeWidthDivisor, 25}, rng.next_u64());
  std::vector<std::string> names;
  std::vector<Tensor> values;
  for (const auto& p : params.entries()) {
    names.push_back(p.name);
    values.push_back(p.name.ends_with(".b") ? random_tensor(rng, p.value.shape(), -0.1, 0.1) : p.value.detach());
  }
  return {names, values};
}

ModelParams bind_params(const std::vector<std::string>& names, const std::vector<Tensor>& x) {
  ModelParams p;
  for (std::size_t i = 0; i < names.size(); ++i) p.add(names[i], x[i], true);
  return p;
}

SuiteReport critic_suite(std::size_t trials, std::uint64_t seed) {
  SuiteReport report{"critic", {}};
  CheckResult check{"critic", 0, 0.0, kCompositeTolerance};
  Rng rng(seed);
  for (std::size_t attempt = 0; check.instances < trials && attempt < 4 * trials; ++attempt) {
    auto [names, inputs] = critic_inputs(rng);
    inputs.push_back(random_tensor(rng, {pick(rng, 1, 2), 1, kAudioLength}));
    const auto shuffle_seed = rng.next_u64();
    Fn f = [names, shuffle_seed](const std::vector<Tensor>& x) {
      Rng shifts(shuffle_seed);
      return critic_forward(bind_params(names, x), x.back(), PhaseShuffle{kPhaseShuffleRadius, &shifts});
    };
    if (const auto err = directional_error(make_objective(f, inputs, rng), inputs, rng, kCompositeStep, check.redraws)) record(check, *err);
  }
  if (check.instances < trials) check.max_rel_error = std::numeric_limits<double>::infinity();
  report.checks.push_back(check);
  return report;
}

SuiteReport physical_suite(std::size_t trials, std::uint64_t seed) {
  SuiteReport report{"physical", {}};
  for (auto kind : {PhysicalKind::kSourceFilter, PhysicalKind::kFrozenRandom}) {
    CheckResult check{std::string(to_string(kind)), 0, 0.0, kCompositeTolerance};
    Rng rng(seed ^ static_cast<std::uint64_t>(kind));
    for (std::size_t t = 0; t < trials; ++t) {
      const PhysicalModel model({kind, rng.next_u64()});
      // Inputs stay inside the clamp ranges of voicing and lip gain.
      const std::vector<Tensor> inputs = {random_tensor(rng, {1, kEmaChannels, pick(rng, 2, 4)}, -0.8, 0.8)};
      Fn f = [&model](const std::vector<Tensor>& x) { return model.forward(x[0]); };
      record(check, elementwise_error(make_objective(f, inputs, rng), inputs, kPrimitiveStep));
    }
    report.checks.push_back(check);
  }
  return report;
}

SuiteReport gp_suite(std::size_t trials, std::uint64_t seed) {
  SuiteReport report{"gp", {}};
  CheckResult check{"gp_loss", 0, 0.0, kCompositeTolerance};
  Rng rng(seed);
  for (std::size_t attempt = 0; check.instances < trials && attempt < 4 * trials; ++attempt) {
    auto [names, inputs] = critic_inputs(rng);
    const auto batch = pick(rng, 1, 2);
    const auto real = random_tensor(rng, {batch, 1, kAudioLength});
    const auto fake = random_tensor(rng, {batch, 1, kAudioLength});
    std::vector<double> eps(batch);
    for (auto& e : eps) e = rng.uniform();
    // Rescale the read-out so the mean input-gradient norm lands in [0.5, 2],
    // where the penalty is active and its value is not swamped by the constant 1.
    {
      std::vector<double> mix(real.numel());
      const auto width = kAudioLength;
      for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = eps[i / width] * real[i] + (1.0 - eps[i / width]) * fake[i];
      const Tensor x_hat(real.shape(), std::move(mix), true);
      const Tensor wrt[] = {x_hat};
      const auto g = ad::gradients(ad::sum(critic_forward(bind_params(names, inputs), x_hat)), wrt).front();
      const double norm = ad::mean(ad::row_norm(g)).item();
      const auto w = static_cast<std::size_t>(std::find(names.begin(), names.end(), "out.w") - names.begin());
      if (norm > 0.0) inputs[w] = ad::scale(inputs[w], rng.uniform(0.5, 2.0) / norm);
    }
    Fn f = [names, real, fake, eps](const std::vector<Tensor>& x) {
      const auto params = bind_params(names, x);
      return gp_loss([&params](const Tensor& audio) { return critic_forward(params, audio); }, real, fake, eps);
    };
    if (const auto err = directional_error(Objective{f, Tensor()}, inputs, rng, kCompositeStep, check.redraws)) {
      record(check, *err);
    }
  }
  if (check.instances < trials) check.max_rel_error = std::numeric_limits<double>::infinity();
  report.checks.push_back(check);
  return report;
}

}  // namespace

double relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  if (analytic.size() != numeric.size()) throw ContractViolation("relative_error: length mismatch");
  double diff = 0.0;
  double na = 0.0;
  double nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-8});
}

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

std::vector<std::string_view> gradcheck_suites() { return {"autodiff", "generator", "critic", "physical", "gp"}; }

SuiteReport run_gradcheck(std::string_view suite, std::size_t trials, std::uint64_t seed) {
  const auto names = gradcheck_suites();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw ContractViolation("gradcheck: unknown suite '" + std::string(suite) + "'");
  }
  if (trials == 0) return {std::string(suite), {}};
  if (suite == "autodiff") return autodiff_suite(trials, seed);
  if (suite == "generator") return generator_suite(trials, seed);
  if (suite == "critic") return critic_suite(trials, seed);
  if (suite == "physical") return physical_suite(trials, seed);
  return gp_suite(trials, seed);
}

}  // namespace artic::verify
