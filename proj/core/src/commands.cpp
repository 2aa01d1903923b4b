#include "numint/commands.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "numint/bundle.hpp"
#include "numint/io.hpp"
#include "numint/rng.hpp"

namespace numint {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_timings_csv(const fs::path& path, const StageTimings& t) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw validation_error("cannot open for writing: " + path.string());
  out << "stage,seconds\n";
  out << "measure," << fmt(t.measure) << "\n";
  out << "mds," << fmt(t.mds) << "\n";
  out << "multilaterate," << fmt(t.multilaterate) << "\n";
  out << "invert," << fmt(t.invert) << "\n";
  out << "merge," << fmt(t.merge) << "\n";
  out << "wf," << fmt(t.wf) << "\n";
}

void write_alignment_csv(const fs::path& path, const RecoveredTM& tm) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw validation_error("cannot open for writing: " + path.string());
  out << "row_index,residual,conj_flag,phase\n";
  for (Index row = 0; row < tm.alignment_residuals.size(); ++row)
    out << row << "," << fmt(tm.alignment_residuals(row)) << ","
        << int(tm.conj_flags[row]) << "," << fmt(tm.phases(row)) << "\n";
}

void write_run_meta(const fs::path& path, const ExperimentConfig& c,
                    const RunReport& report) {
  write_kv(path, {
                     {"n", std::to_string(c.n)},
                     {"m", std::to_string(c.rows())},
                     {"k_per_set", std::to_string(c.k())},
                     {"anchors", std::to_string(c.s_anchors)},
                     {"bits", std::to_string(c.bits)},
                     {"noise", fmt(c.noise_sigma)},
                     {"alpha", fmt(c.alpha)},
                     {"gain", fmt(report.gain)},
                     {"seed_probe", std::to_string(c.seed_probe)},
                     {"seed_anchor", std::to_string(c.seed_anchor)},
                     {"seed_tm", std::to_string(c.seed_tm)},
                     {"excluded_rows", format_index_list(report.excluded_rows)},
                     {"unrecovered_columns", std::to_string(report.unrecovered_columns)},
                 });
}

void write_probe_sidecar(const fs::path& path, const ProbeSet& probes) {
  auto gen_to_string = [](const VecD& g) {
    std::string s;
    for (Index i = 0; i < g.size(); ++i) s += g(i) != 0.0 ? '1' : '0';
    return s;
  };
  std::vector<Index> zeros = probes.zero_rows;
  write_kv(path, {
                     {"n", std::to_string(probes.n())},
                     {"k", std::to_string(probes.k_count())},
                     {"gen_a", gen_to_string(probes.gen_a)},
                     {"gen_b", gen_to_string(probes.gen_b)},
                     {"zero_rows", format_index_list(zeros)},
                     {"seed", std::to_string(probes.seed)},
                 });
}

VecD load_scene(const std::string& scene_path, Index n, std::uint64_t seed,
                bool grayscale) {
  if (scene_path.empty()) return random_binary_scene(n, seed);
  const MatD raw = read_nif_real(scene_path);
  if (raw.size() != n)
    throw validation_error("scene size " + std::to_string(raw.size()) +
                           " does not match N = " + std::to_string(n));
  VecD scene(n);
  Index pos = 0;
  for (Index i = 0; i < raw.rows(); ++i)
    for (Index j = 0; j < raw.cols(); ++j) scene(pos++) = raw(i, j);
  for (Index i = 0; i < n; ++i) {
    const double v = scene(i);
    if (grayscale ? (v < 0.0 || v > 1.0) : (v != 0.0 && v != 1.0))
      throw validation_error(grayscale ? "grayscale scene entries must be in [0, 1]"
                                       : "scene must be binary (use --grayscale?)");
  }
  return scene;
}

void write_loss_trace(const fs::path& path, const std::vector<LossSample>& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw validation_error("cannot open for writing: " + path.string());
  out << "iter,stage,loss\n";
  for (const LossSample& s : trace)
    out << s.iter << "," << s.stage << "," << fmt(s.loss) << "\n";
}

}  // namespace

void write_report_csv(const fs::path& path, const ExperimentConfig& config,
                      const RunReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw validation_error("cannot open for writing: " + path.string());
  out << "n,oversampling,tm_rel_err,img_rel_err,seconds_total\n";
  out << config.n << "," << fmt(config.oversampling) << "," << fmt(report.tm_rel_err)
      << "," << fmt(report.img_rel_err) << "," << fmt(report.seconds_total()) << "\n";
}

RunReport cmd_calibrate(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);

  CalibrationOutput out = run_calibration(config);
  write_nif(dir / "tm.nif", out.tm.entries);
  write_timings_csv(dir / "timings.csv", out.report.timings);
  write_alignment_csv(dir / "alignment.csv", out.tm);
  write_run_meta(dir / "run.meta", config, out.report);
  write_report_csv(dir / "report.csv", config, out.report);
  return out.report;
}

RunReport cmd_image(const fs::path& tm_path, const ExperimentConfig& config,
                    const std::string& scene_path, bool grayscale) {
  config.validate();
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);

  const MatC tm = read_nif_complex(tm_path);
  if (tm.cols() != config.n)
    throw validation_error("TM columns do not match config n");

  // Reuse the calibration exposure when the TM ships with a meta file.
  double gain = 1.0;
  const fs::path meta = tm_path.parent_path() / "run.meta";
  if (fs::exists(meta)) {
    const auto kv = read_kv(meta);
    if (auto it = kv.find("gain"); it != kv.end()) gain = std::stod(it->second);
  }

  const VecD scene = load_scene(scene_path, config.n, config.seed_scene, grayscale);
  ImagingOutput imaging = run_imaging(tm, config, scene, gain, !grayscale);

  MatD signal_out(tm.cols(), 2);
  for (Index j = 0; j < tm.cols(); ++j) {
    signal_out(j, 0) = imaging.wf.signal(j).real();
    signal_out(j, 1) = imaging.wf.signal(j).imag();
  }
  write_nif(dir / "reconstruction.nif", signal_out);
  write_loss_trace(dir / "loss_trace.csv", imaging.wf.trace);

  RunReport report;
  report.timings.wf = imaging.seconds;
  report.img_rel_err = imaging.img_rel_err;
  report.gain = gain;
  write_report_csv(dir / "report.csv", config, report);
  return report;
}

std::vector<RunReport> cmd_bench(const ExperimentConfig& base, const BenchOptions& opts) {
  const fs::path dir(base.out_dir);
  fs::create_directories(dir);
  std::ofstream csv(dir / "bench.csv", std::ios::trunc);
  if (!csv) throw validation_error("cannot open bench.csv for writing");
  csv << "n,oversampling,tm_rel_err,img_rel_err,seconds_total\n";

  std::vector<RunReport> reports;
  const std::vector<Index> ns = opts.n_sweep.empty() ? std::vector<Index>{base.n}
                                                     : opts.n_sweep;
  const std::vector<double> overs = opts.oversampling_sweep.empty()
                                        ? std::vector<double>{base.oversampling}
                                        : opts.oversampling_sweep;

  CalibrationOptions copts;
  copts.materialize_tm = opts.with_image;  // bench streams unless imaging needs the TM

  bool warmed_up = false;
  for (Index n : ns) {
    for (double oversampling : overs) {
      ExperimentConfig config = base;
      config.n = n;
      config.oversampling = oversampling;
      config.validate();

      if (!warmed_up) {
        run_calibration(config, copts);  // discard one warm-up run
        warmed_up = true;
      }
      CalibrationOutput out = run_calibration(config, copts);
      RunReport report = out.report;
      if (opts.with_image) {
        const VecD scene = random_binary_scene(config.n, config.seed_scene);
        ImagingOutput imaging =
            run_imaging(out.tm.entries, config, scene, report.gain, true);
        report.img_rel_err = imaging.img_rel_err;
        report.timings.wf = imaging.seconds;
      }
      csv << config.n << "," << fmt(oversampling) << "," << fmt(report.tm_rel_err)
          << "," << fmt(report.img_rel_err) << "," << fmt(report.seconds_total())
          << "\n";
      csv.flush();
      reports.push_back(report);
    }
  }
  return reports;
}

void cmd_simulate(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);

  auto [probes1, probes2] = design_probe_pair(config.n, config.k(), config.seed_probe);
  const AnchorSet anchors1 = design_anchor_pyramid(
      {&probes1}, config.s_anchors, config.fill_fraction,
      derive_seed(config.seed_anchor, 1));
  const AnchorSet anchors2 = design_anchor_pyramid(
      {&probes2}, config.s_anchors, config.fill_fraction,
      derive_seed(config.seed_anchor, 2));

  CameraModel camera;
  camera.bits = config.bits;
  camera.noise_sigma = config.noise_sigma;
  SimulatedOpu opu =
      SimulatedOpu::from_seed(config.rows(), config.n, config.seed_tm, camera);
  if (config.bits > 0) {
    double raw_max = std::max(
        max_raw_intensity_rows(opu.with_camera(CameraModel{}), probes1, anchors1, 0,
                               opu.rows()),
        max_raw_intensity_rows(opu.with_camera(CameraModel{}), probes2, anchors2, 0,
                               opu.rows()));
    camera.gain = camera.quantized_max() / raw_max;
    opu = opu.with_camera(camera);
  }

  int set_id = 1;
  for (const auto& pair : {std::pair{&probes1, &anchors1}, std::pair{&probes2, &anchors2}}) {
    const ProbeSet& probes = *pair.first;
    const AnchorSet& anchors = *pair.second;
    const std::string tag = "set" + std::to_string(set_id++);

    write_nif(dir / (tag + "_probes.nif"), probes.xi);
    write_probe_sidecar(dir / (tag + "_probes.meta"), probes);
    write_nif(dir / (tag + "_anchors.nif"), anchors.anchors);

    const IntensityBundle bundle = simulate_bundle(opu, probes, anchors);
    write_nif(dir / (tag + "_anchor_mags.nif"), bundle.anchor_mags);
    write_nif(dir / (tag + "_anchor_pairs.nif"), bundle.anchor_pairs);
    write_nif(dir / (tag + "_probe_to_origin.nif"), bundle.probe_to_origin);
    write_nif(dir / (tag + "_probe_to_anchor.nif"), bundle.probe_to_anchor);
  }

  write_kv(dir / "simulate.meta",
           {
               {"n", std::to_string(config.n)},
               {"m", std::to_string(config.rows())},
               {"k_per_set", std::to_string(config.k())},
               {"anchors", std::to_string(config.s_anchors)},
               {"bits", std::to_string(config.bits)},
               {"gain", fmt(camera.gain)},
               {"seed_tm", std::to_string(config.seed_tm)},
           });
}

}  // namespace numint
