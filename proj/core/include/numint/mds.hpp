#pragma once

#include <cstdint>
#include <vector>

#include "numint/bundle.hpp"
#include "numint/types.hpp"

namespace numint {

// Stack of per-row squared Euclidean distance matrices between the S anchor
// images on the complex plane. Row m of `d` holds D_m flattened row-major
// (S x S, symmetric, zero diagonal, camera units).
struct AnchorDistanceMatrix {
  Index s_count = 0;
  MatD d;  // M x S*S

  Index rows() const { return d.rows(); }
  double at(Index m, Index q, Index s) const { return d(m, q * s_count + s); }
};

// Localized anchors per TM row. positions(m, S-1) == 0 (origin anchoring);
// quality is the lambda_3 / lambda_2 eigenvalue ratio of the per-row Gram
// (planarity diagnostic); degenerate rows cannot support multilateration.
struct AnchorConstellation {
  MatC positions;  // M x S
  VecD quality;
  std::vector<std::uint8_t> degenerate;

  Index rows() const { return positions.rows(); }
  Index s_count() const { return positions.cols(); }
};

AnchorDistanceMatrix build_distance_matrices(const IntensityBundle& bundle);

// Classical MDS per row: G = -1/2 J D J, top two eigenpairs give the planar
// embedding, then the origin anchor is subtracted. Rows whose second
// eigenvalue falls below 1e-6 * lambda_1 are flagged degenerate.
AnchorConstellation localize_anchors(const AnchorDistanceMatrix& dists);

}  // namespace numint
