#pragma once

#include <vector>

#include "numint/bundle.hpp"
#include "numint/mds.hpp"
#include "numint/types.hpp"

namespace numint {

// Per-row multilateration system. Row s of `matrix` is [-2 Re r_s, -2 Im r_s, 1];
// the unknown per probe is [Re y, Im y, |y|^2].
struct RowSystem {
  Eigen::Matrix<double, Eigen::Dynamic, 3> matrix;  // S x 3
  Eigen::Matrix<double, 3, Eigen::Dynamic> pinv;    // 3 x S
};

// Throws numerical_error when the anchors are numerically colinear
// (sigma_min < 1e-8 * sigma_max); such rows must be excluded.
RowSystem build_system(const VecC& row_anchors);

// Complex probe measurements recovered by multilateration, with a per-entry
// consistency score: | |y|^2 - w3 | / max(w3, eps) where w3 is the solved
// squared-norm component.
struct PhasedMeasurements {
  MatC y;          // M x K
  MatD residual;   // M x K; +inf on excluded rows
  std::vector<Index> excluded_rows;
};

// One row: squared distances to the S anchors (origin included via the
// probe-to-origin readout) -> K complex values plus residuals.
void recover_row(const RowSystem& system, const IntensityBundle& bundle, Index row,
                 cxd* y_out, double* residual_out);

// Maps recover_row over all rows not flagged degenerate; colinear-anchor
// failures are excluded as well. Throws when every row is excluded.
PhasedMeasurements recover_all_phases(const IntensityBundle& bundle,
                                      const AnchorConstellation& constellation);

}  // namespace numint
