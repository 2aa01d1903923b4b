#pragma once

#include <cstdint>
#include <vector>

#include "numint/circulant.hpp"
#include "numint/multilateration.hpp"
#include "numint/probes.hpp"
#include "numint/types.hpp"

namespace numint {

// Columns of the TM recovered by one probe set. column_indices are the
// probe set's nonzero rows, sorted.
struct PartialTM {
  MatC columns;  // M x K/2
  std::vector<Index> column_indices;
  Index n_total = 0;
  int source_id = 0;
};

// Merged estimate. Each row matches the true TM only up to a unit phase and
// optional conjugation; that ambiguity class is shared by all consumers.
struct RecoveredTM {
  MatC entries;                          // M x N
  std::vector<int> provenance;           // per column: 1, 2, or 0 (unrecovered)
  VecD alignment_residuals;              // per row, relative residual on shared columns
  std::vector<std::uint8_t> conj_flags;  // per row, 1 if part2 was conjugated
  VecD phases;                           // per row, applied phase (radians)
  std::vector<Index> rejected_rows;      // rows whose best residual exceeded 0.5
  double shared_disagreement = 0.0;      // mean residual on shared columns
};

// FFT fast path: Y = [Y_A, Y_B], estimate = alpha Y_A C_A^{-1} + beta Y_B C_B^{-1}
// via length-(K/2) FFTs row by row. Columns correspond to nonzero_rows.
PartialTM recover_tm_fft(const MatC& y, const ProbeSet& probes, double alpha = 0.5);

inline PartialTM recover_tm_fft(const PhasedMeasurements& y, const ProbeSet& probes,
                                double alpha = 0.5) {
  return recover_tm_fft(y.y, probes, alpha);
}

// Dense baseline: minimum-norm least squares against xi restricted to its
// nonzero rows (rank-revealing). Zero-row columns come back as 0.
MatC recover_tm_lsq(const MatC& y, const MatU8& xi);

// Closed-form alignment of `candidate` onto `reference` over `len` entries:
// phase * op(candidate) with op in {identity, conj}, minimizing the l2 gap.
struct RowAlignment {
  cxd phase = 1.0;         // unit scalar applied to candidate
  bool conjugate = false;  // conjugate candidate first
  double residual_sq = 0.0;
};

RowAlignment best_row_alignment(const cxd* reference, const cxd* candidate, Index len);

RecoveredTM align_and_merge(const PartialTM& part1, const PartialTM& part2);

// Relative Frobenius error after per-row phase/conjugation alignment of
// estimate onto truth. Restricting `columns` compares a recovered subset.
double tm_relative_error(const MatC& estimate, const MatC& truth);
double tm_relative_error(const MatC& estimate, const MatC& truth,
                         const std::vector<Index>& columns);

// Streaming variant for row-blocked pipelines.
class TmErrorAccumulator {
 public:
  explicit TmErrorAccumulator(std::vector<Index> columns) : columns_(std::move(columns)) {}

  void add_rows(const MatC& estimate_rows, const MatC& truth_rows);
  double value() const;

 private:
  std::vector<Index> columns_;
  double err_sq_ = 0.0;
  double truth_sq_ = 0.0;
};

}  // namespace numint
