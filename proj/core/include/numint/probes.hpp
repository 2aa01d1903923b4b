#pragma once

#include <cstdint>
#include <vector>

#include "numint/types.hpp"

namespace numint {

// K binary probe signals: two (K/2 x K/2) circulant blocks stacked side by
// side, with N - K/2 all-zero rows inserted so the probes sit in R^{N x K}.
// The generators are kept so the TM fit can invert the blocks with FFTs.
struct ProbeSet {
  MatU8 xi;                          // N x K, entries 0/1
  VecD gen_a;                        // length K/2, first column of block A
  VecD gen_b;                        // length K/2, first column of block B
  std::vector<Index> zero_rows;      // sorted, size N - K/2
  std::vector<Index> nonzero_rows;   // sorted complement, size K/2
  std::uint64_t seed = 0;

  Index n() const { return xi.rows(); }
  Index k_count() const { return xi.cols(); }
  Index half_k() const { return xi.cols() / 2; }
};

// S binary anchor signals with nested supports; column S-1 is the origin.
// Differences between anchors, and anchor-minus-probe differences, stay
// binary so a DMD can display them.
struct AnchorSet {
  MatU8 anchors;  // N x S

  Index n() const { return anchors.rows(); }
  Index s_count() const { return anchors.cols(); }
};

// Generators are Bernoulli(1/2); resampled while any circulant eigenvalue
// magnitude falls below 1e-9 (the FFT inverse needs invertible blocks).
ProbeSet design_probe_set(Index n, Index k, std::uint64_t seed);

// Shared-row floor for merging two partial recoveries.
Index min_shared_rows(Index n);

// Two probe sets for a full calibration: the second set's zero rows are drawn
// from the first set's nonzero rows where possible, keeping at least
// min_shared_rows(n) nonzero rows in common for row alignment.
std::pair<ProbeSet, ProbeSet> design_probe_pair(Index n, Index k, std::uint64_t seed);

// Anchor pyramid: each anchor is the support union of all probes and earlier
// anchors, plus ceil(fill_fraction * |zero set|) extra ones placed uniformly
// in the remaining zero set. Throws when the zero set runs out before
// s_count anchors exist (the error reports the feasible S).
AnchorSet design_anchor_pyramid(const std::vector<const ProbeSet*>& probes,
                                Index s_count, double fill_fraction,
                                std::uint64_t seed);

enum class PlanRole : std::uint8_t {
  kAnchorMag = 0,     // v_s, distance of anchor s to the origin
  kAnchorPair = 1,    // v_q - v_s for q < s < S-1
  kProbeToOrigin = 2, // xi_k, distance of probe k to the origin
  kProbeToAnchor = 3, // v_s - xi_k
};

struct PlanEntry {
  PlanRole role;
  Index k = -1;  // probe index where applicable
  Index s = -1;  // anchor index where applicable
  Index q = -1;  // first anchor of a pair
};

// Ordered list of DMD patterns for one calibration run. Entry order is the
// bundle layout contract: anchor magnitudes, anchor pairs (lexicographic),
// probes, then probe-to-anchor differences grouped by probe.
struct MeasurementPlan {
  Index n = 0;
  Index k_count = 0;
  Index s_count = 0;
  std::vector<PlanEntry> entries;

  Index size() const { return static_cast<Index>(entries.size()); }
};

MeasurementPlan measurement_plan(const ProbeSet& probes, const AnchorSet& anchors);

// Materializes the plan as a binary N x B batch (column b = entry b).
MatD plan_matrix(const MeasurementPlan& plan, const ProbeSet& probes,
                 const AnchorSet& anchors);

}  // namespace numint
