#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "numint/calibrate.hpp"
#include "numint/opu.hpp"
#include "numint/probes.hpp"
#include "numint/types.hpp"
#include "numint/wirtinger.hpp"

namespace numint {

struct ExperimentConfig {
  Index n = 256;
  double oversampling = 16.0;  // M = round(oversampling * n)
  double k_ratio = 1.5;        // K per probe set = round(k_ratio * n), made even
  Index k_per_set = 0;         // explicit K overrides k_ratio when > 0
  Index s_anchors = 20;
  int bits = 0;
  double noise_sigma = 0.0;
  double alpha = 0.5;
  double fill_fraction = 0.15;
  std::uint64_t seed_probe = 1001;
  std::uint64_t seed_anchor = 2002;
  std::uint64_t seed_tm = 3003;
  std::uint64_t seed_wf = 4004;
  std::uint64_t seed_scene = 5005;
  std::string out_dir = "numint-out";

  Index rows() const;
  Index k() const;
  void validate() const;
  // key=value overrides (config file wins over flags)
  void apply_overrides(const std::map<std::string, std::string>& kv);
};

struct StageTimings {
  double measure = 0.0;
  double mds = 0.0;
  double multilaterate = 0.0;
  double invert = 0.0;
  double merge = 0.0;
  double wf = 0.0;
};

struct RunReport {
  StageTimings timings;
  double tm_rel_err = std::numeric_limits<double>::quiet_NaN();
  double img_rel_err = std::numeric_limits<double>::quiet_NaN();
  double median_residual = 0.0;  // median over per-row multilateration medians
  double max_residual = 0.0;
  double shared_disagreement = 0.0;
  double gain = 1.0;
  Index unrecovered_columns = 0;
  std::vector<Index> excluded_rows;

  // Numerical calibration time: the simulated optics (measure) and the
  // imaging stage are not part of the calibration algorithm.
  double seconds_total() const {
    return timings.mds + timings.multilaterate + timings.invert + timings.merge;
  }
};

struct CalibrationOptions {
  bool materialize_tm = true;   // assemble the M x N estimate in memory
  bool compute_rel_err = true;  // compare against the simulator's ground truth
};

struct CalibrationOutput {
  RecoveredTM tm;  // entries empty when materialize_tm is false
  RunReport report;
  // per-row merge diagnostics are inside tm (residuals, flags, phases)
};

// Full dual-probe-set calibration against the simulated OPU, streamed over
// row blocks so memory stays proportional to the block size.
CalibrationOutput run_calibration(const ExperimentConfig& config,
                                  const CalibrationOptions& options = {});

struct ImagingOutput {
  WFResult wf;
  double img_rel_err = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

// Measures |A_true x|^2 through the simulator (same exposure gain as the
// calibration that produced tm_estimate) and reconstructs with the estimate.
ImagingOutput run_imaging(const MatC& tm_estimate, const ExperimentConfig& config,
                          const VecD& scene, double gain, bool binary_scene = true);

// Random binary scene, Bernoulli(1/2) per pixel.
VecD random_binary_scene(Index n, std::uint64_t seed);

// Default staged protocol: problems up to N = 1024 run a single 500-iteration
// stage on every measurement; larger ones warm-start from 500 iterations on
// 4N measurements and then run 2000 iterations on all of them.
WFConfig default_wf_config(Index n, Index m, std::uint64_t seed);

}  // namespace numint
