#include "numint/wirtinger.hpp"

#include <cmath>

#include "numint/rng.hpp"

namespace numint {

double intensity_loss(const MatC& tm_rows, const VecD& b, const VecC& x) {
  const VecC u = tm_rows * x;
  const VecD r = u.cwiseAbs2() - b;
  return r.squaredNorm() / static_cast<double>(tm_rows.rows());
}

VecC gradient_of_loss(const MatC& tm_rows, const VecD& b, const VecC& x) {
  const VecC u = tm_rows * x;
  const VecD r = u.cwiseAbs2() - b;
  const VecC weighted = r.cast<cxd>().cwiseProduct(u);
  return (2.0 / static_cast<double>(tm_rows.rows())) * (tm_rows.adjoint() * weighted);
}

namespace {

void clip_modulus(VecC& x, double limit) {
  for (Index j = 0; j < x.size(); ++j) {
    const double mag = std::abs(x(j));
    if (mag > limit) x(j) *= limit / mag;
  }
}

double stage_step(const WFConfig& config, const VecD& b_used) {
  if (config.step_size > 0.0) return config.step_size;
  const double mean_b = b_used.size() > 0 ? b_used.mean() : 0.0;
  return mean_b > 0.0 ? 0.1 / mean_b : 0.1;
}

void run_stage(const MatC& rows, const VecD& b, VecC& x, Index iters, int stage,
               double step, double clip, std::vector<LossSample>& trace) {
  for (Index it = 0; it < iters; ++it) {
    const VecC u = rows * x;
    const VecD r = u.cwiseAbs2() - b;
    const double loss = r.squaredNorm() / static_cast<double>(rows.rows());
    trace.push_back({it, stage, loss});
    if (!std::isfinite(loss))
      throw numerical_error("wf_reconstruct: loss diverged at stage " +
                            std::to_string(stage) + " iteration " + std::to_string(it));
    const VecC weighted = r.cast<cxd>().cwiseProduct(u);
    const VecC grad =
        (2.0 / static_cast<double>(rows.rows())) * (rows.adjoint() * weighted);
    x -= step * grad;
    clip_modulus(x, clip);
  }
  trace.push_back({iters, stage, intensity_loss(rows, b, x)});
}

}  // namespace

WFResult wf_reconstruct(const ImagingTask& task, const WFConfig& config) {
  const Index m = task.tm.rows();
  const Index n = task.tm.cols();
  if (task.intensities.size() != m)
    throw validation_error("wf_reconstruct: intensity length != M");
  if (config.stage1_iters < 0 || config.stage2_iters < 0)
    throw validation_error("wf_reconstruct: iteration counts must be >= 0");
  if (!(config.clip_modulus > 0.0))
    throw validation_error("wf_reconstruct: clip_modulus must be positive");

  Index m1 = config.stage1_measurements > 0 ? config.stage1_measurements
                                            : std::min<Index>(4 * n, m);
  if (m1 < 1 || m1 > m)
    throw validation_error("wf_reconstruct: need 1 <= stage1_measurements <= M");

  WFResult result;
  Rng rng(config.init_seed);
  VecC x(n);
  for (Index j = 0; j < n; ++j) x(j) = cxd(rng.uniform(), 0.0);

  {
    const MatC rows = task.tm.topRows(m1);
    const VecD b = task.intensities.head(m1);
    run_stage(rows, b, x, config.stage1_iters, 1, stage_step(config, b),
              config.clip_modulus, result.trace);
  }

  if (config.stage2_iters > 0) {
    // warm start: keep only the modulus of the stage-1 iterate
    for (Index j = 0; j < n; ++j) x(j) = cxd(std::abs(x(j)), 0.0);
    run_stage(task.tm, task.intensities, x, config.stage2_iters, 2,
              stage_step(config, task.intensities), config.clip_modulus, result.trace);
  }

  result.signal = std::move(x);
  return result;
}

double signal_relative_error(const VecC& estimate, const VecD& truth) {
  if (estimate.size() != truth.size())
    throw validation_error("signal_relative_error: length mismatch");
  const double norm_t = truth.norm();
  if (!(norm_t > 0.0))
    throw validation_error("signal_relative_error: truth has zero norm");

  cxd inner(0.0, 0.0);
  for (Index j = 0; j < truth.size(); ++j) inner += estimate(j) * truth(j);
  const double gap_sq = estimate.squaredNorm() + norm_t * norm_t - 2.0 * std::abs(inner);
  return std::sqrt(std::max(0.0, gap_sq)) / norm_t;
}

double measurement_residual(const MatC& tm, const VecD& b, const VecC& x) {
  const VecD z = (tm * x).cwiseAbs2();
  const double nb = b.norm();
  return nb > 0.0 ? (z - b).norm() / nb : (z - b).norm();
}

}  // namespace numint
