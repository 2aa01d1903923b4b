#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "numint/types.hpp"

namespace numint {

// One imaging problem: find x from b = |A x|^2 using a calibrated TM.
struct ImagingTask {
  MatC tm;           // M x N estimate
  VecD intensities;  // length M, camera units
  std::optional<VecD> truth;  // optional scorer input, entries in [0, 1]
};

struct WFConfig {
  Index stage1_iters = 500;
  Index stage2_iters = 2000;
  Index stage1_measurements = 0;  // 0 -> min(4N, M)
  double step_size = 0.0;         // 0 -> 0.1 / mean(b) per stage
  std::uint64_t init_seed = 0;
  double clip_modulus = 1.0;
};

struct LossSample {
  Index iter;
  int stage;
  double loss;
};

struct WFResult {
  VecC signal;
  std::vector<LossSample> trace;
};

// Quartic intensity loss f(x) = (1/M') sum_m (|<a^m, x>|^2 - b_m)^2 and its
// Wirtinger gradient (2/M') A^H ((|Ax|^2 - b) .* Ax). The gradient is exposed
// on its own so it can be checked against finite differences.
double intensity_loss(const MatC& tm_rows, const VecD& b, const VecC& x);
VecC gradient_of_loss(const MatC& tm_rows, const VecD& b, const VecC& x);

// Staged gradient descent: stage 1 runs on the first stage1_measurements rows
// from a random uniform [0, 1) start; stage 2 restarts from the elementwise
// absolute value of the stage-1 iterate and uses every measurement. After
// each step, entries with modulus above clip_modulus are rescaled onto it.
WFResult wf_reconstruct(const ImagingTask& task, const WFConfig& config);

// ||x_hat - x||_2 / ||x||_2 after aligning the estimate's global phase.
double signal_relative_error(const VecC& estimate, const VecD& truth);

// || |Ax|^2 - b ||_2 / ||b||_2, the measurement-domain consistency score.
double measurement_residual(const MatC& tm, const VecD& b, const VecC& x);

}  // namespace numint
