#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "articgan/analysis/analysis.hpp"
#include "articgan/error.hpp"
#include "articgan/io/checkpoint.hpp"
#include "articgan/io/dataset.hpp"
#include "articgan/io/ema_csv.hpp"
#include "articgan/io/wav.hpp"
#include "articgan/physical/physical_model.hpp"
#include "articgan/train/sampling.hpp"
#include "articgan/train/synthetic.hpp"
#include "articgan/train/trainer.hpp"
#include "articgan/verify/gradcheck.hpp"

namespace py = pybind11;
using namespace artic;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> ema_to_array(const EmaTrajectory& ema) {
  const auto T = ema.frames();
  py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(kEmaChannels), static_cast<py::ssize_t>(T)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t c = 0; c < kEmaChannels; ++c)
    for (std::size_t t = 0; t < T; ++t) m(c, t) = ema.channels[c][t];
  return out;
}

EmaTrajectory ema_from_array(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != static_cast<py::ssize_t>(kEmaChannels)) {
    throw ContractViolation("EMA array must have shape (13, T)");
  }
  auto ema = EmaTrajectory::zeros(static_cast<std::size_t>(a.shape(1)));
  auto r = a.unchecked<2>();
  for (std::size_t c = 0; c < kEmaChannels; ++c)
    for (std::size_t t = 0; t < ema.frames(); ++t) ema.channels[c][t] = r(c, t);
  return ema;
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw ContractViolation("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

py::dict metrics_dict(const StepMetrics& m) {
  py::dict d;
  d["step"] = m.step;
  d["critic_loss"] = m.critic_loss;
  d["gen_loss"] = m.gen_loss;
  d["gp"] = m.gp;
  d["wasserstein_gap"] = m.wasserstein_gap;
  d["grad_norm_g"] = m.grad_norm_g;
  d["grad_norm_d"] = m.grad_norm_d;
  return d;
}

py::list train_run(std::size_t steps, std::uint64_t seed, std::size_t width_divisor, std::size_t batch_size,
               const std::string& physical, std::optional<std::filesystem::path> data,
               std::optional<std::filesystem::path> checkpoint) {
  TrainConfig config;
  config.total_steps = steps;
  config.seed = seed;
  config.width_divisor = width_divisor;
  config.batch_size = batch_size;
  config.checkpoint_every = 0;
  config.physical_kind = parse_physical_kind(physical);
  config.validate();
  const auto dataset = data ? dataset_load(*data) : synthetic_dataset();
  py::list rows;
  TrainSinks sinks;
  sinks.on_step = [&](const StepMetrics& m) { rows.append(metrics_dict(m)); };
  if (checkpoint) sinks.on_checkpoint = [&](std::size_t, const Checkpoint& c) { checkpoint_save(*checkpoint, c); };
  train(config, dataset, sinks);
  return rows;
}

py::list generate(const std::filesystem::path& checkpoint, std::size_t num, std::uint64_t seed) {
  const auto ckpt = checkpoint_load(checkpoint);
  py::list out;
  for (const auto& s : generate_samples(ckpt.extract_params("gen."), physical_from_checkpoint(ckpt), num, seed)) {
    out.append(py::make_tuple(ema_to_array(s.ema), to_array(s.audio.samples)));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Articulatory GAN core bindings";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", PyExc_RuntimeError);

  std::vector<std::string> names(kEmaChannelNames.begin(), kEmaChannelNames.end());
  m.attr("EMA_CHANNELS") = names;
  m.attr("SAMPLE_RATE") = static_cast<int>(kAudioRate);

  m.def(
      "synthesize",
      [](const Array& ema, const std::string& kind, std::uint64_t seed) {
        const PhysicalModel model({parse_physical_kind(kind), seed});
        return to_array(model.synthesize(ema_from_array(ema)).samples);
      },
      py::arg("ema"), py::arg("kind") = "source_filter", py::arg("seed") = 0,
      "Render a (13, T) EMA array to 80*T audio samples.");
  m.def(
      "physical_hash",
      [](const std::string& kind, std::uint64_t seed) { return PhysicalModel({parse_physical_kind(kind), seed}).params_hash(); },
      py::arg("kind") = "source_filter", py::arg("seed") = 0);
  m.def(
      "synthetic_word", [](std::size_t i) { return ema_to_array(synthetic_word(i)); }, py::arg("index"));

  m.def("train", &train_run, py::arg("steps"), py::arg("seed") = 0, py::arg("width_divisor") = 32,
        py::arg("batch_size") = 8, py::arg("physical") = "source_filter", py::arg("data") = py::none(),
        py::arg("checkpoint") = py::none(),
        "Train on a WAV directory (or the synthetic words) and return one metrics dict per step.");
  m.def("generate", &generate, py::arg("checkpoint"), py::arg("num") = 1, py::arg("seed") = 0,
        "List of (ema, audio) pairs from a checkpoint.");

  m.def(
      "loess_smooth", [](const Array& x, double span, int degree) { return to_array(loess_smooth(to_vector(x), span, degree)); },
      py::arg("series"), py::arg("span") = 0.2, py::arg("degree") = 1);
  m.def(
      "dtw_align",
      [](const Array& a, const Array& b) {
        const auto r = dtw_align(to_vector(a), to_vector(b));
        py::dict d;
        d["path"] = r.path;
        d["warped_a"] = to_array(r.warped_a);
        d["warped_b"] = to_array(r.warped_b);
        d["cost"] = r.total_cost;
        return d;
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "pearson_r", [](const Array& a, const Array& b) { return pearson_r(to_vector(a), to_vector(b)); }, py::arg("a"),
      py::arg("b"), "Pearson's r, or None when a series is constant.");
  m.def(
      "dtw_corr",
      [](const Array& gen, const Array& real, double span, int degree, bool z_normalize) {
        py::list rows;
        for (const auto& row : dtw_corr_pipeline(ema_from_array(gen), ema_from_array(real), {span, degree, z_normalize})) {
          py::dict d;
          d["place"] = row.place;
          d["axis"] = std::string(1, row.axis);
          d["r"] = row.r;
          d["dtw_cost"] = row.dtw_cost;
          rows.append(d);
        }
        return rows;
      },
      py::arg("gen"), py::arg("real"), py::arg("span") = 0.2, py::arg("degree") = 1, py::arg("z_normalize") = false);
  m.def(
      "odds_ratio_test",
      [](long long a, long long b, long long c, long long d) {
        const auto r = odds_ratio_test(a, b, c, d);
        return py::make_tuple(r.odds_ratio, r.p_value);
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), "(odds ratio or None, two-sided Fisher p).");

  m.def(
      "gradcheck",
      [](const std::string& suite, std::size_t trials, std::uint64_t seed) {
        py::list rows;
        for (const auto& c : verify::run_gradcheck(suite, trials, seed).checks) {
          py::dict d;
          d["check"] = c.name;
          d["instances"] = c.instances;
          d["max_rel_error"] = c.max_rel_error;
          d["tolerance"] = c.tolerance;
          d["passed"] = c.passed();
          rows.append(d);
        }
        return rows;
      },
      py::arg("suite"), py::arg("trials") = 10, py::arg("seed") = 0);

  m.def(
      "read_wav", [](const std::filesystem::path& p) { return to_array(wav_read(p).samples); }, py::arg("path"));
  m.def(
      "write_wav", [](const std::filesystem::path& p, const Array& x) { wav_write(p, Waveform{to_vector(x)}); },
      py::arg("path"), py::arg("samples"));
  m.def(
      "read_ema", [](const std::filesystem::path& p) { return ema_to_array(ema_read(p)); }, py::arg("path"));
  m.def(
      "write_ema", [](const std::filesystem::path& p, const Array& ema) { ema_write(p, ema_from_array(ema)); },
      py::arg("path"), py::arg("ema"));
}
