#include "numint/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "numint/bundle.hpp"
#include "numint/rng.hpp"

namespace numint {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  return values[mid];
}

Index block_rows(Index m, Index k, Index s) {
  // ~16 MB of bundle per block
  const Index bytes_per_row = k * (s + 1) * 8 + s * s * 8;
  Index rows = (Index(1) << 24) / std::max<Index>(bytes_per_row, 1);
  return std::clamp<Index>(rows, 16, std::max<Index>(16, m));
}

}  // namespace

Index ExperimentConfig::rows() const {
  return static_cast<Index>(std::llround(oversampling * static_cast<double>(n)));
}

Index ExperimentConfig::k() const {
  if (k_per_set > 0) return k_per_set;
  Index k = static_cast<Index>(std::llround(k_ratio * static_cast<double>(n)));
  if (k % 2 != 0) ++k;
  return k;
}

void ExperimentConfig::validate() const {
  if (n < 2) throw validation_error("config: n must be >= 2");
  if (rows() < 1) throw validation_error("config: oversampling * n must be >= 1");
  const Index kk = k();
  if (kk % 2 != 0) throw validation_error("config: k_per_set must be even");
  if (kk / 2 < 4) throw validation_error("config: k/2 must be >= 4");
  if (kk / 2 >= n)
    throw validation_error("config: k/2 must be < n (anchors need free zero rows)");
  if (s_anchors < 3) throw validation_error("config: s_anchors must be >= 3");
  if (bits < 0 || bits > 16) throw validation_error("config: bits must be in [0, 16]");
  if (noise_sigma < 0.0) throw validation_error("config: noise must be >= 0");
  if (!(fill_fraction > 0.0 && fill_fraction < 1.0))
    throw validation_error("config: fill_fraction must be in (0, 1)");
}

void ExperimentConfig::apply_overrides(const std::map<std::string, std::string>& kv) {
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = get("n")) n = std::stoll(*v);
  if (auto* v = get("oversampling")) oversampling = std::stod(*v);
  if (auto* v = get("k_ratio")) k_ratio = std::stod(*v);
  if (auto* v = get("k_per_set")) k_per_set = std::stoll(*v);
  if (auto* v = get("anchors")) s_anchors = std::stoll(*v);
  if (auto* v = get("bits")) bits = std::stoi(*v);
  if (auto* v = get("noise")) noise_sigma = std::stod(*v);
  if (auto* v = get("alpha")) alpha = std::stod(*v);
  if (auto* v = get("fill_fraction")) fill_fraction = std::stod(*v);
  if (auto* v = get("seed_probe")) seed_probe = std::stoull(*v);
  if (auto* v = get("seed_anchor")) seed_anchor = std::stoull(*v);
  if (auto* v = get("seed_tm")) seed_tm = std::stoull(*v);
  if (auto* v = get("seed_wf")) seed_wf = std::stoull(*v);
  if (auto* v = get("seed_scene")) seed_scene = std::stoull(*v);
  if (auto* v = get("out")) out_dir = *v;
}

CalibrationOutput run_calibration(const ExperimentConfig& config,
                                  const CalibrationOptions& options) {
  config.validate();
  const Index n = config.n;
  const Index m = config.rows();
  const Index k = config.k();
  const Index s = config.s_anchors;

  auto [probes1, probes2] = design_probe_pair(n, k, config.seed_probe);
  const AnchorSet anchors1 = design_anchor_pyramid(
      {&probes1}, s, config.fill_fraction, derive_seed(config.seed_anchor, 1));
  const AnchorSet anchors2 = design_anchor_pyramid(
      {&probes2}, s, config.fill_fraction, derive_seed(config.seed_anchor, 2));

  CameraModel raw_camera;  // gain 1, no noise, no quantization
  const SimulatedOpu opu_raw = SimulatedOpu::from_seed(m, n, config.seed_tm, raw_camera);

  const Index block = block_rows(m, k, s);

  CameraModel camera;
  camera.bits = config.bits;
  camera.noise_sigma = config.noise_sigma;
  if (config.bits > 0) {
    // One exposure for the whole experiment: the brightest raw intensity of
    // the full calibration batch maps to the top quantization level.
    double raw_max = 0.0;
    for (Index r0 = 0; r0 < m; r0 += block) {
      const Index r1 = std::min(m, r0 + block);
      raw_max = std::max(raw_max,
                         max_raw_intensity_rows(opu_raw, probes1, anchors1, r0, r1));
      raw_max = std::max(raw_max,
                         max_raw_intensity_rows(opu_raw, probes2, anchors2, r0, r1));
    }
    if (!(raw_max > 0.0))
      throw numerical_error("run_calibration: calibration batch is all dark");
    camera.gain = camera.quantized_max() / raw_max;
  }
  const SimulatedOpu opu = opu_raw.with_camera(camera);

  CalibrationOutput out;
  out.report.gain = camera.gain;

  // Columns recoverable by at least one probe set.
  std::vector<char> covered(n, 0);
  for (Index c : probes1.nonzero_rows) covered[c] = 1;
  for (Index c : probes2.nonzero_rows) covered[c] = 1;
  std::vector<Index> recovered_cols;
  for (Index c = 0; c < n; ++c)
    if (covered[c]) recovered_cols.push_back(c);
  out.report.unrecovered_columns = n - static_cast<Index>(recovered_cols.size());

  TmErrorAccumulator err_acc(recovered_cols);

  if (options.materialize_tm) out.tm.entries = MatC::Zero(m, n);
  out.tm.alignment_residuals = VecD::Zero(m);
  out.tm.conj_flags.assign(m, 0);
  out.tm.phases = VecD::Zero(m);

  std::vector<double> row_medians;
  row_medians.reserve(2 * m);
  double shared_sum = 0.0;
  StageTimings& t = out.report.timings;

  for (Index r0 = 0; r0 < m; r0 += block) {
    const Index r1 = std::min(m, r0 + block);

    auto t0 = Clock::now();
    const IntensityBundle bundle1 = simulate_bundle_rows(opu, probes1, anchors1, r0, r1);
    const IntensityBundle bundle2 = simulate_bundle_rows(opu, probes2, anchors2, r0, r1);
    t.measure += seconds_since(t0);

    t0 = Clock::now();
    const AnchorConstellation con1 = localize_anchors(build_distance_matrices(bundle1));
    const AnchorConstellation con2 = localize_anchors(build_distance_matrices(bundle2));
    t.mds += seconds_since(t0);

    t0 = Clock::now();
    const PhasedMeasurements ph1 = recover_all_phases(bundle1, con1);
    const PhasedMeasurements ph2 = recover_all_phases(bundle2, con2);
    t.multilaterate += seconds_since(t0);

    t0 = Clock::now();
    const PartialTM part1 = recover_tm_fft(ph1, probes1, config.alpha);
    PartialTM part2 = recover_tm_fft(ph2, probes2, config.alpha);
    part2.source_id = 2;
    t.invert += seconds_since(t0);

    t0 = Clock::now();
    RecoveredTM merged = align_and_merge(part1, part2);
    t.merge += seconds_since(t0);

    // Camera-unit distances scale the recovered rows by sqrt(gain); the
    // simulator knows its own exposure, so return the estimate to physical
    // units. (On real hardware the global scale would stay ambiguous.)
    if (camera.gain != 1.0) merged.entries *= 1.0 / std::sqrt(camera.gain);

    for (Index row : ph1.excluded_rows) out.report.excluded_rows.push_back(r0 + row);
    for (Index row : ph2.excluded_rows) out.report.excluded_rows.push_back(r0 + row);
    for (const PhasedMeasurements* ph : {&ph1, &ph2})
      for (Index row = 0; row < r1 - r0; ++row) {
        const VecD res = ph->residual.row(row).transpose();
        if (res.allFinite())
          row_medians.push_back(
              median_of(std::vector<double>(res.data(), res.data() + res.size())));
      }
    shared_sum += merged.shared_disagreement * static_cast<double>(r1 - r0);
    out.tm.alignment_residuals.segment(r0, r1 - r0) = merged.alignment_residuals;
    out.tm.phases.segment(r0, r1 - r0) = merged.phases;
    std::copy(merged.conj_flags.begin(), merged.conj_flags.end(),
              out.tm.conj_flags.begin() + r0);
    for (Index row : merged.rejected_rows) out.tm.rejected_rows.push_back(r0 + row);
    if (options.materialize_tm)
      out.tm.entries.middleRows(r0, r1 - r0) = merged.entries;
    if (out.tm.provenance.empty()) out.tm.provenance = merged.provenance;
    out.tm.shared_disagreement = shared_sum / static_cast<double>(r1);

    if (options.compute_rel_err)
      err_acc.add_rows(merged.entries, opu.tm_block(r0, r1));
  }

  std::sort(out.report.excluded_rows.begin(), out.report.excluded_rows.end());
  out.report.excluded_rows.erase(
      std::unique(out.report.excluded_rows.begin(), out.report.excluded_rows.end()),
      out.report.excluded_rows.end());
  out.report.median_residual = median_of(row_medians);
  for (double v : row_medians) out.report.max_residual = std::max(out.report.max_residual, v);
  out.report.shared_disagreement = out.tm.shared_disagreement;
  if (options.compute_rel_err) out.report.tm_rel_err = err_acc.value();
  return out;
}

VecD random_binary_scene(Index n, std::uint64_t seed) {
  Rng rng(seed);
  VecD scene(n);
  for (Index i = 0; i < n; ++i) scene(i) = rng.bernoulli_half() ? 1.0 : 0.0;
  return scene;
}

WFConfig default_wf_config(Index n, Index m, std::uint64_t seed) {
  WFConfig cfg;
  cfg.init_seed = seed;
  if (n <= 1024) {
    cfg.stage1_iters = 500;
    cfg.stage1_measurements = m;
    cfg.stage2_iters = 0;
  } else {
    cfg.stage1_iters = 500;
    cfg.stage1_measurements = std::min<Index>(4 * n, m);
    cfg.stage2_iters = 2000;
  }
  return cfg;
}

ImagingOutput run_imaging(const MatC& tm_estimate, const ExperimentConfig& config,
                          const VecD& scene, double gain, bool binary_scene) {
  const Index m = tm_estimate.rows();
  const Index n = tm_estimate.cols();
  if (scene.size() != n)
    throw validation_error("run_imaging: scene length != TM columns");

  CameraModel camera;
  camera.bits = config.bits;
  camera.gain = gain;
  camera.noise_sigma = config.noise_sigma;
  const SimulatedOpu opu = SimulatedOpu::from_seed(m, n, config.seed_tm, camera);

  VecD b(m);
  if (binary_scene) {
    MatD scene_col(n, 1);
    scene_col.col(0) = scene;
    b = opu.measure(scene_col).col(0);
  } else {
    // grayscale scenes bypass the DMD binary check but keep the same camera
    MatD scene_col(n, 1);
    scene_col.col(0) = scene;
    const MatC field = opu.fields(scene_col);
    for (Index i = 0; i < m; ++i)
      b(i) = apply_camera(camera, std::norm(field(i, 0)), opu.noise_seed(),
                          static_cast<std::uint64_t>(i));
  }
  // The TM estimate is in physical units; bring the camera readout back too.
  if (gain != 1.0) b *= 1.0 / gain;

  ImagingOutput out;
  const auto t0 = Clock::now();
  ImagingTask task{tm_estimate, b, scene};
  out.wf = wf_reconstruct(task, default_wf_config(n, m, config.seed_wf));
  out.seconds = seconds_since(t0);
  out.img_rel_err = signal_relative_error(out.wf.signal, scene);
  out.residual = measurement_residual(tm_estimate, b, out.wf.signal);
  return out;
}

}  // namespace numint
