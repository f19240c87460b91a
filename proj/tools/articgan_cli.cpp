#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "articgan/analysis/analysis.hpp"
#include "articgan/error.hpp"
#include "articgan/io/checkpoint.hpp"
#include "articgan/io/dataset.hpp"
#include "articgan/io/ema_csv.hpp"
#include "articgan/io/wav.hpp"
#include "articgan/models/critic.hpp"
#include "articgan/physical/physical_model.hpp"
#include "articgan/train/sampling.hpp"
#include "articgan/train/synthetic.hpp"
#include "articgan/train/trainer.hpp"
#include "articgan/verify/gradcheck.hpp"

namespace fs = std::filesystem;
using namespace artic;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

fs::path prepare_dir(const std::string& dir) {
  if (dir.empty()) throw ContractViolation("no output directory: pass --out or set ARTICGAN_OUT");
  fs::create_directories(dir);
  return dir;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string numbered(std::size_t i, const char* suffix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03zu%s", i, suffix);
  return buf;
}

struct TrainArgs {
  std::string data;
  bool toy = false;
  std::string out;
  std::string phys = "source-filter";
  TrainConfig config;
};

void run_train(const TrainArgs& args) {
  auto config = args.config;
  config.physical_kind = parse_physical_kind(args.phys);
  config.validate();
  if (args.toy == !args.data.empty()) throw ContractViolation("train: pass exactly one of --data or --toy");
  const auto dataset = args.toy ? synthetic_dataset() : dataset_load(args.data, kAudioLength);
  const auto out = prepare_dir(args.out);
  std::ofstream metrics(out / "metrics.csv");
  if (!metrics) throw FormatError("cannot write " + (out / "metrics.csv").string());
  TrainSinks sinks;
  sinks.metrics = &metrics;
  sinks.on_checkpoint = [&](std::size_t step, const Checkpoint& ckpt) {
    checkpoint_save(out / ("step_" + std::to_string(step) + ".ckpt"), ckpt);
  };
  sinks.on_step = [&](const StepMetrics&) { metrics.flush(); };
  const auto trainer = train(config, dataset, sinks);
  checkpoint_save(out / "final.ckpt", trainer.checkpoint());
  std::cout << "trained " << trainer.steps_done() << " steps, outputs in " << out.string() << "\n";
}

void run_generate(const std::string& ckpt_path, std::size_t num, std::uint64_t seed, const std::string& out_dir) {
  const auto ckpt = checkpoint_load(ckpt_path);
  const auto generator = ckpt.extract_params("gen.");
  const auto physical = physical_from_checkpoint(ckpt);
  const auto out = prepare_dir(out_dir);
  const auto samples = generate_samples(generator, physical, num, seed);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ema_write(out / numbered(i, ".ema.csv"), samples[i].ema);
    wav_write(out / numbered(i, ".wav"), samples[i].audio);
  }
  std::cout << "wrote " << samples.size() << " samples to " << out.string() << "\n";
}

void run_synth(const std::string& ema_path, const std::string& out_path, const std::string& phys, std::uint64_t seed) {
  const auto ema = ema_read(ema_path);
  const PhysicalModel model({parse_physical_kind(phys), seed});
  wav_write(out_path, model.synthesize(ema));
}

int run_gradcheck(const std::string& module, std::size_t trials, std::uint64_t seed) {
  std::vector<std::string_view> suites;
  if (module == "all") {
    suites = verify::gradcheck_suites();
  } else {
    suites.push_back(module);
  }
  bool ok = true;
  std::printf("suite,check,instances,redraws,max_rel_error,tolerance,status\n");
  for (auto suite : suites) {
    const auto report = verify::run_gradcheck(suite, trials, seed);
    for (const auto& c : report.checks) {
      std::printf("%s,%s,%zu,%zu,%.3e,%.0e,%s\n", report.suite.c_str(), c.name.c_str(), c.instances, c.redraws, c.max_rel_error,
                  c.tolerance, c.passed() ? "PASS" : "FAIL");
    }
    ok = ok && report.passed();
  }
  return ok ? 0 : 1;
}

void run_toy_data(const std::string& out_dir, std::uint64_t phys_seed) {
  const auto out = prepare_dir(out_dir);
  const auto dataset = synthetic_dataset(phys_seed);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    wav_write(out / dataset.names[i], Waveform{dataset.items[i]});
    ema_write(out / ("word" + std::to_string(i) + ".ema.csv"), synthetic_word(i));
  }
  std::cout << "wrote " << dataset.size() << " words to " << out.string() << "\n";
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Articulatory GAN toolkit: training, generation, synthesis and EMA analysis"};
  app.require_subcommand(1);
  const char* env_out = std::getenv("ARTICGAN_OUT");
  const std::string default_out = env_out ? env_out : "";

  TrainArgs train_args;
  train_args.out = default_out;
  auto* train_cmd = app.add_subcommand("train", "Train the GAN with the frozen physical model");
  train_cmd->add_option("--data", train_args.data, "Directory of word-length WAV files");
  train_cmd->add_flag("--toy", train_args.toy, "Train on the built-in eight-word synthetic dataset");
  train_cmd->add_option("--steps", train_args.config.total_steps, "Training steps")->capture_default_str();
  train_cmd->add_option("--batch", train_args.config.batch_size, "Batch size")->capture_default_str();
  train_cmd->add_option("--seed", train_args.config.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--phys", train_args.phys, "Physical model: source-filter or frozen-random")
      ->capture_default_str();
  train_cmd->add_option("--phys-seed", train_args.config.physical_seed, "Physical model seed")->capture_default_str();
  train_cmd->add_option("--n-critic", train_args.config.n_critic, "Critic steps per generator step")
      ->capture_default_str();
  train_cmd->add_option("--gp-lambda", train_args.config.gp_lambda, "Gradient penalty weight")->capture_default_str();
  train_cmd->add_option("--lr-g", train_args.config.lr_generator, "Generator learning rate")->capture_default_str();
  train_cmd->add_option("--lr-d", train_args.config.lr_critic, "Critic learning rate")->capture_default_str();
  train_cmd->add_option("--checkpoint-every", train_args.config.checkpoint_every, "Checkpoint period, 0 disables")
      ->capture_default_str();
  train_cmd->add_option("--width-divisor", train_args.config.width_divisor, "Divide hidden widths by this factor")
      ->capture_default_str();
  train_cmd->add_option("--out", train_args.out, "Output directory (default $ARTICGAN_OUT)");

  std::string gen_ckpt;
  std::size_t gen_num = 1;
  std::uint64_t gen_seed = 0;
  std::string gen_out = default_out;
  auto* gen_cmd = app.add_subcommand("generate", "Generate EMA and audio from a checkpoint");
  gen_cmd->add_option("--checkpoint", gen_ckpt, "Checkpoint file")->required();
  gen_cmd->add_option("--num", gen_num, "Number of samples")->capture_default_str();
  gen_cmd->add_option("--seed", gen_seed, "Latent seed")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output directory (default $ARTICGAN_OUT)");

  std::string synth_ema;
  std::string synth_out;
  std::string synth_phys = "source-filter";
  std::uint64_t synth_seed = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Render an EMA CSV to a WAV with the physical model");
  synth_cmd->add_option("--ema", synth_ema, "EMA CSV")->required();
  synth_cmd->add_option("--out", synth_out, "Output WAV")->required();
  synth_cmd->add_option("--phys", synth_phys, "Physical model kind")->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed, "Physical model seed")->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "EMA analysis");
  analyze->require_subcommand(1);

  std::string dc_gen;
  std::string dc_real;
  std::string dc_out;
  CorrelationOptions dc_opts;
  auto* dtw_cmd = analyze->add_subcommand("dtw-corr", "Per-channel DTW alignment and Pearson r");
  dtw_cmd->add_option("--gen", dc_gen, "Generated EMA CSV")->required();
  dtw_cmd->add_option("--real", dc_real, "Real EMA CSV")->required();
  dtw_cmd->add_option("--span", dc_opts.span, "LOESS span")->capture_default_str();
  dtw_cmd->add_option("--degree", dc_opts.degree, "LOESS degree")->capture_default_str();
  dtw_cmd->add_flag("--z-normalize", dc_opts.z_normalize, "Z-score channels before alignment");
  dtw_cmd->add_option("--out", dc_out, "Report CSV (default stdout)");

  std::vector<long long> or_counts;
  auto* or_cmd = analyze->add_subcommand("or-test", "Odds ratio with two-sided Fisher exact p for [[A B] [C D]]");
  or_cmd->add_option("counts", or_counts, "A B C D")->required()->expected(4);

  std::string sm_in;
  std::string sm_out;
  double sm_span = 0.2;
  int sm_degree = 1;
  auto* smooth_cmd = analyze->add_subcommand("smooth", "LOESS-smooth the articulator channels of an EMA CSV");
  smooth_cmd->add_option("--in", sm_in, "EMA CSV")->required();
  smooth_cmd->add_option("--span", sm_span, "LOESS span")->capture_default_str();
  smooth_cmd->add_option("--degree", sm_degree, "LOESS degree")->capture_default_str();
  smooth_cmd->add_option("--out", sm_out, "Output EMA CSV (default stdout)");

  std::string ex_gen;
  std::string ex_real;
  std::string ex_out = default_out;
  double ex_scale = kRealDisplayScale;
  double ex_span = 0.2;
  auto* export_cmd = analyze->add_subcommand("export-2d", "Per-articulator 2D trajectory CSVs");
  export_cmd->add_option("--gen", ex_gen, "Generated EMA CSV")->required();
  export_cmd->add_option("--real", ex_real, "Real EMA CSV");
  export_cmd->add_option("--real-scale", ex_scale, "Multiplier for real coordinates")->capture_default_str();
  export_cmd->add_option("--span", ex_span, "LOESS span")->capture_default_str();
  export_cmd->add_option("--out", ex_out, "Output directory (default $ARTICGAN_OUT)");

  std::string gc_module = "all";
  std::size_t gc_trials = 100;
  std::uint64_t gc_seed = 0;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gc_cmd->add_option("--module", gc_module, "autodiff, generator, critic, physical, gp or all")
      ->check(CLI::IsMember({"autodiff", "generator", "critic", "physical", "gp", "all"}))
      ->capture_default_str();
  gc_cmd->add_option("--trials", gc_trials, "Random instances per check")->capture_default_str();
  gc_cmd->add_option("--seed", gc_seed, "Seed")->capture_default_str();

  std::string toy_out = default_out;
  std::uint64_t toy_seed = 0;
  auto* toy_cmd = app.add_subcommand("toy-data", "Write the eight-word synthetic dataset (WAV and EMA CSV)");
  toy_cmd->add_option("--out", toy_out, "Output directory (default $ARTICGAN_OUT)");
  toy_cmd->add_option("--phys-seed", toy_seed, "Physical model seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train_cmd) run_train(train_args);
    if (*gen_cmd) run_generate(gen_ckpt, gen_num, gen_seed, gen_out);
    if (*synth_cmd) run_synth(synth_ema, synth_out, synth_phys, synth_seed);
    if (*dtw_cmd) {
      const auto report = dtw_corr_pipeline(ema_read(dc_gen), ema_read(dc_real), dc_opts);
      emit(format_correlation_report(report), dc_out);
    }
    if (*or_cmd) {
      const auto r = odds_ratio_test(or_counts[0], or_counts[1], or_counts[2], or_counts[3]);
      std::cout << "odds_ratio,p_value\n" << (r.odds_ratio ? fmt(*r.odds_ratio) : "NA") << "," << fmt(r.p_value) << "\n";
    }
    if (*smooth_cmd) {
      auto ema = ema_read(sm_in);
      for (std::size_t ch = 0; ch < kArticulatorChannels; ++ch) {
        ema.channels[ch] = loess_smooth(ema.channels[ch], sm_span, sm_degree);
      }
      if (sm_out.empty()) {
        ema_format(std::cout, ema);
      } else {
        ema_write(sm_out, ema);
      }
    }
    if (*export_cmd) {
      const auto gen = ema_read(ex_gen);
      EmaTrajectory real;
      if (!ex_real.empty()) real = ema_read(ex_real);
      const auto out = prepare_dir(ex_out);
      for (const auto& t : trajectory_export(gen, ex_real.empty() ? nullptr : &real, ex_scale, ex_span)) {
        write_text(out / (t.place + ".csv"), format_trajectory_table(t));
      }
    }
    if (*gc_cmd) return run_gradcheck(gc_module, gc_trials, gc_seed);
    if (*toy_cmd) run_toy_data(toy_out, toy_seed);
  } catch (const ContractViolation& e) {
    std::cerr << "error: contract: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: format: " << e.what() << "\n";
    return 3;
  } catch (const TrainingDiverged& e) {
    std::cerr << "error: diverged: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
