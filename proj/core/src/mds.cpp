#include "numint/mds.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "numint/parallel.hpp"

namespace numint {

namespace {
constexpr double kColinearRatio = 1e-6;
}

AnchorDistanceMatrix build_distance_matrices(const IntensityBundle& bundle) {
  const Index m = bundle.rows();
  const Index s = bundle.s_count;
  const Index pair_count = (s - 1) * (s - 2) / 2;
  if (bundle.anchor_pairs.cols() != pair_count || bundle.anchor_mags.cols() != s - 1)
    throw validation_error("build_distance_matrices: incomplete bundle");

  AnchorDistanceMatrix out;
  out.s_count = s;
  out.d = MatD::Zero(m, s * s);
  for (Index row = 0; row < m; ++row) {
    for (Index q = 0; q < s - 1; ++q) {
      // distance to the origin anchor is the anchor magnitude readout
      const double mag = bundle.anchor_mags(row, q);
      out.d(row, q * s + (s - 1)) = mag;
      out.d(row, (s - 1) * s + q) = mag;
      for (Index a = q + 1; a < s - 1; ++a) {
        const double v = bundle.anchor_pairs(row, IntensityBundle::pair_index(q, a, s));
        out.d(row, q * s + a) = v;
        out.d(row, a * s + q) = v;
      }
    }
  }
  return out;
}

AnchorConstellation localize_anchors(const AnchorDistanceMatrix& dists) {
  const Index m = dists.rows();
  const Index s = dists.s_count;
  if (s < 3) throw validation_error("localize_anchors: need S >= 3");

  AnchorConstellation out;
  out.positions = MatC::Zero(m, s);
  out.quality = VecD::Zero(m);
  out.degenerate.assign(m, 0);

  parallel_for(0, m, [&](std::int64_t row) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        d(dists.d.row(row).data(), s, s);

    // Double centering: G = -1/2 J D J with J = I - (1/S) 1 1^T.
    Eigen::VectorXd row_mean = d.rowwise().mean();
    const double total_mean = row_mean.mean();
    Eigen::MatrixXd gram(s, s);
    for (Index q = 0; q < s; ++q)
      for (Index a = 0; a < s; ++a)
        gram(q, a) = -0.5 * (d(q, a) - row_mean(q) - row_mean(a) + total_mean);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) {
      out.degenerate[row] = 1;
      out.quality(row) = std::numeric_limits<double>::infinity();
      return;
    }
    // Eigen sorts ascending; lambda_1 is the last.
    const double l1 = eig.eigenvalues()(s - 1);
    const double l2 = eig.eigenvalues()(s - 2);
    const double l3 = s >= 3 ? eig.eigenvalues()(s - 3) : 0.0;

    if (!(l2 > kColinearRatio * std::max(l1, 0.0)) || !(l1 > 0.0)) {
      out.degenerate[row] = 1;
      out.quality(row) = std::numeric_limits<double>::infinity();
      return;
    }
    out.quality(row) = l3 / l2;

    const double sq1 = std::sqrt(std::max(l1, 0.0));
    const double sq2 = std::sqrt(std::max(l2, 0.0));
    const Eigen::VectorXd& u1 = eig.eigenvectors().col(s - 1);
    const Eigen::VectorXd& u2 = eig.eigenvectors().col(s - 2);
    const cxd origin(sq1 * u1(s - 1), sq2 * u2(s - 1));
    for (Index a = 0; a < s; ++a)
      out.positions(row, a) = cxd(sq1 * u1(a), sq2 * u2(a)) - origin;
  });
  return out;
}

}  // namespace numint
