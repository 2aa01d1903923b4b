#include "numint/multilateration.hpp"

#include <Eigen/SVD>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>

#include "numint/parallel.hpp"

namespace numint {

namespace {
constexpr double kColinearCutoff = 1e-8;
constexpr double kPinvCutoff = 1e-10;
constexpr double kResidualEps = 1e-12;
}  // namespace

RowSystem build_system(const VecC& row_anchors) {
  const Index s = row_anchors.size();
  if (s < 3) throw validation_error("build_system: need at least 3 anchors");

  RowSystem sys;
  sys.matrix.resize(s, 3);
  for (Index a = 0; a < s; ++a) {
    sys.matrix(a, 0) = -2.0 * row_anchors(a).real();
    sys.matrix(a, 1) = -2.0 * row_anchors(a).imag();
    sys.matrix(a, 2) = 1.0;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.matrix,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(2) < kColinearCutoff * sv(0))
    throw numerical_error("build_system: anchors are colinear");

  Eigen::Vector3d inv_sv;
  for (int i = 0; i < 3; ++i)
    inv_sv(i) = sv(i) > kPinvCutoff * sv(0) ? 1.0 / sv(i) : 0.0;
  sys.pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  return sys;
}

void recover_row(const RowSystem& system, const IntensityBundle& bundle, Index row,
                 cxd* y_out, double* residual_out) {
  const Index s = bundle.s_count;
  const Index k = bundle.k_count;

  // e_k(s) = y2_{ks} - r2_s; the origin anchor row reduces to |y_k|^2.
  Eigen::MatrixXd rhs(s, k);
  for (Index p = 0; p < k; ++p) {
    for (Index a = 0; a < s - 1; ++a)
      rhs(a, p) = bundle.probe_to_anchor(row, p * (s - 1) + a) -
                  bundle.anchor_mags(row, a);
    rhs(s - 1, p) = bundle.probe_to_origin(row, p);
  }

  const Eigen::Matrix<double, 3, Eigen::Dynamic> w = system.pinv * rhs;
  for (Index p = 0; p < k; ++p) {
    const cxd y(w(0, p), w(1, p));
    y_out[p] = y;
    const double w3 = w(2, p);
    residual_out[p] = std::abs(std::norm(y) - w3) / std::max(w3, kResidualEps);
  }
}

PhasedMeasurements recover_all_phases(const IntensityBundle& bundle,
                                      const AnchorConstellation& constellation) {
  const Index m = bundle.rows();
  const Index k = bundle.k_count;
  if (constellation.rows() != m || constellation.s_count() != bundle.s_count)
    throw validation_error("recover_all_phases: bundle/constellation shape mismatch");

  PhasedMeasurements out;
  out.y = MatC::Zero(m, k);
  out.residual = MatD::Zero(m, k);
  std::vector<std::uint8_t> excluded(m, 0);

  parallel_for(0, m, [&](std::int64_t row) {
    if (!constellation.degenerate[row]) {
      try {
        const RowSystem sys = build_system(constellation.positions.row(row));
        recover_row(sys, bundle, row, out.y.row(row).data(),
                    out.residual.row(row).data());
        return;
      } catch (const numerical_error&) {
        // fall through: colinear anchors, exclude the row
      }
    }
    excluded[row] = 1;
    out.residual.row(row).setConstant(std::numeric_limits<double>::infinity());
  });

  for (Index row = 0; row < m; ++row)
    if (excluded[row]) out.excluded_rows.push_back(row);
  if (static_cast<Index>(out.excluded_rows.size()) == m)
    throw numerical_error("recover_all_phases: every row is degenerate");
  return out;
}

}  // namespace numint
