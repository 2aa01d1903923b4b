// numint: transmission-matrix calibration against a simulated optical
// processing unit, plus imaging through the recovered matrix.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "numint/commands.hpp"
#include "numint/io.hpp"

namespace {

void add_config_flags(CLI::App* cmd, numint::ExperimentConfig& config,
                      std::string& config_file) {
  cmd->add_option("--n", config.n, "input dimension N");
  cmd->add_option("--oversampling", config.oversampling, "rows per unknown, M = o*N");
  cmd->add_option("--k-ratio", config.k_ratio, "probes per set as a ratio of N");
  cmd->add_option("--k-per-set", config.k_per_set, "probes per set (overrides ratio)");
  cmd->add_option("--anchors", config.s_anchors, "anchor count S (origin included)");
  cmd->add_option("--bits", config.bits, "camera bit depth, 0 = exact");
  cmd->add_option("--noise", config.noise_sigma, "camera noise sigma (camera units)");
  cmd->add_option("--alpha", config.alpha, "right-inverse mixing weight");
  cmd->add_option("--fill-fraction", config.fill_fraction, "anchor zero-set fill");
  cmd->add_option("--seed-probe", config.seed_probe, "probe design seed");
  cmd->add_option("--seed-anchor", config.seed_anchor, "anchor design seed");
  cmd->add_option("--seed-tm", config.seed_tm, "simulated TM seed");
  cmd->add_option("--seed-wf", config.seed_wf, "reconstruction init seed");
  cmd->add_option("--seed-scene", config.seed_scene, "random scene seed");
  cmd->add_option("--out", config.out_dir, "output directory");
  cmd->add_option("--config", config_file, "key=value config file (overrides flags)");
}

void finish_config(numint::ExperimentConfig& config, const std::string& config_file) {
  if (!config_file.empty()) config.apply_overrides(numint::read_kv(config_file));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical interferometry TM calibration toolkit"};
  app.require_subcommand(1);

  numint::ExperimentConfig config;
  std::string config_file;

  auto* calibrate = app.add_subcommand("calibrate", "recover the TM of the simulated OPU");
  add_config_flags(calibrate, config, config_file);

  auto* image = app.add_subcommand("image", "reconstruct a scene through a recovered TM");
  std::string tm_path, scene_path;
  bool grayscale = false;
  image->add_option("--tm", tm_path, "NIF1 complex TM file")->required();
  image->add_option("--scene", scene_path, "NIF1 scene (default: random binary)");
  image->add_flag("--grayscale", grayscale, "allow scene values in [0, 1]");
  add_config_flags(image, config, config_file);

  auto* bench = app.add_subcommand("bench", "time calibration over a size sweep");
  numint::BenchOptions bench_opts;
  bench->add_option("--n-sweep", bench_opts.n_sweep, "list of N values");
  bench->add_option("--oversampling-sweep", bench_opts.oversampling_sweep,
                    "list of oversampling factors");
  bench->add_flag("--with-image", bench_opts.with_image,
                  "also reconstruct a scene per run");
  add_config_flags(bench, config, config_file);

  auto* simulate = app.add_subcommand("simulate", "persist probes, anchors and readouts");
  add_config_flags(simulate, config, config_file);

  CLI11_PARSE(app, argc, argv);

  try {
    finish_config(config, config_file);
    if (calibrate->parsed()) {
      const numint::RunReport report = numint::cmd_calibrate(config);
      std::printf("calibrate: n=%lld m=%lld tm_rel_err=%.6g seconds=%.3f -> %s\n",
                  static_cast<long long>(config.n),
                  static_cast<long long>(config.rows()), report.tm_rel_err,
                  report.seconds_total(), config.out_dir.c_str());
    } else if (image->parsed()) {
      const numint::RunReport report =
          numint::cmd_image(tm_path, config, scene_path, grayscale);
      std::printf("image: n=%lld img_rel_err=%.6g wf_seconds=%.3f -> %s\n",
                  static_cast<long long>(config.n), report.img_rel_err,
                  report.timings.wf, config.out_dir.c_str());
    } else if (bench->parsed()) {
      const auto reports = numint::cmd_bench(config, bench_opts);
      std::printf("bench: %zu runs -> %s/bench.csv\n", reports.size(),
                  config.out_dir.c_str());
    } else if (simulate->parsed()) {
      numint::cmd_simulate(config);
      std::printf("simulate: wrote probe/anchor/readout files -> %s\n",
                  config.out_dir.c_str());
    }
  } catch (const numint::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
