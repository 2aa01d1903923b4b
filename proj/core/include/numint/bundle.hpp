#pragma once

#include "numint/opu.hpp"
#include "numint/probes.hpp"
#include "numint/types.hpp"

namespace numint {

// All camera readouts of one calibration run, grouped by role. Layouts are
// pinned to the measurement_plan entry order so pack/unpack round-trips.
struct IntensityBundle {
  Index s_count = 0;
  Index k_count = 0;
  MatD probe_to_anchor;  // M x K*(S-1); (m, k*(S-1) + s)
  MatD probe_to_origin;  // M x K
  MatD anchor_mags;      // M x (S-1)
  MatD anchor_pairs;     // M x (S-1)(S-2)/2, pairs (q, s) with q < s, lexicographic

  Index rows() const { return probe_to_origin.rows(); }

  // Flat index of pair (q, s), q < s < S-1.
  static Index pair_index(Index q, Index s, Index s_count);
};

// Splits a measured M x B batch (columns in plan order) into the bundle.
IntensityBundle unpack_bundle(const MeasurementPlan& plan, const MatD& intensities);

// Bundle for TM rows [row_begin, row_end), computed from the complex fields:
// anchor fields by a dense product, probe fields through the circulant
// blocks, difference intensities as |field - field|^2. Produces the same
// values (and the same camera/noise path) as measuring the materialized plan.
IntensityBundle simulate_bundle_rows(const SimulatedOpu& opu, const ProbeSet& probes,
                                     const AnchorSet& anchors, Index row_begin,
                                     Index row_end);

IntensityBundle simulate_bundle(const SimulatedOpu& opu, const ProbeSet& probes,
                                const AnchorSet& anchors);

// Max raw intensity over the whole plan for rows [row_begin, row_end) with
// gain 1 and the camera stage off; used to calibrate the 8-bit exposure.
double max_raw_intensity_rows(const SimulatedOpu& opu, const ProbeSet& probes,
                              const AnchorSet& anchors, Index row_begin, Index row_end);

}  // namespace numint
