#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "numint/pipeline.hpp"

namespace numint {

// CLI entry points; tests drive these directly. Every command writes into
// config.out_dir and returns the run report.

// calibrate: tm.nif, timings.csv (stage,seconds), report.csv, alignment.csv
// (row_index,residual,conj_flag,phase), run.meta (gain + config echo).
RunReport cmd_calibrate(const ExperimentConfig& config);

// image: reconstructs scene_path (NIF1; empty -> random binary scene from
// seed_scene) through tm_path; writes reconstruction.nif, loss_trace.csv
// (iter,stage,loss), report.csv. The exposure gain is read from the meta
// file next to the TM when present.
RunReport cmd_image(const std::filesystem::path& tm_path,
                    const ExperimentConfig& config, const std::string& scene_path,
                    bool grayscale = false);

// bench: sweeps n and oversampling, timing calibration stages (one warm-up
// run discarded); writes bench.csv with the fixed header
// n,oversampling,tm_rel_err,img_rel_err,seconds_total.
struct BenchOptions {
  std::vector<Index> n_sweep;
  std::vector<double> oversampling_sweep;
  bool with_image = false;
};

std::vector<RunReport> cmd_bench(const ExperimentConfig& base, const BenchOptions& opts);

// simulate: probe/anchor construction plus the measured plan, persisted as
// NIF1 matrices with key=value sidecars.
void cmd_simulate(const ExperimentConfig& config);

void write_report_csv(const std::filesystem::path& path, const ExperimentConfig& config,
                      const RunReport& report);

}  // namespace numint
