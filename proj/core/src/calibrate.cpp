#include "numint/calibrate.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "numint/parallel.hpp"

namespace numint {

namespace {
constexpr double kSpectrumFloor = 1e-9;
constexpr double kRejectThreshold = 0.5;
constexpr double kNormEps = 1e-300;
}  // namespace

PartialTM recover_tm_fft(const MatC& y, const ProbeSet& probes, double alpha) {
  const Index n2 = probes.half_k();
  if (y.cols() != 2 * n2)
    throw validation_error("recover_tm_fft: Y width != K");

  const Dft dft(static_cast<int>(n2));
  const CirculantSpectrum spectra = make_spectrum(probes.gen_a, probes.gen_b, alpha);
  if (min_spectrum_magnitude(spectra.lambda_a) < kSpectrumFloor ||
      min_spectrum_magnitude(spectra.lambda_b) < kSpectrumFloor)
    throw numerical_error("recover_tm_fft: singular circulant spectrum");

  PartialTM part;
  part.columns.resize(y.rows(), n2);
  part.column_indices = probes.nonzero_rows;
  part.n_total = probes.n();

  parallel_for(0, y.rows(), [&](std::int64_t m) {
    std::vector<cxd> ya(n2), yb(n2), scratch(n2);
    const cxd* yrow = y.row(m).data();
    std::copy(yrow, yrow + n2, ya.begin());
    std::copy(yrow + n2, yrow + 2 * n2, yb.begin());
    row_times_circulant_inverse(dft, spectra.lambda_a, ya.data(), scratch.data());
    row_times_circulant_inverse(dft, spectra.lambda_b, yb.data(), scratch.data());
    cxd* out = part.columns.row(m).data();
    for (Index j = 0; j < n2; ++j)
      out[j] = spectra.alpha * ya[j] + spectra.beta * yb[j];
  });
  return part;
}

MatC recover_tm_lsq(const MatC& y, const MatU8& xi) {
  const Index n = xi.rows();
  const Index k = xi.cols();
  if (y.cols() != k) throw validation_error("recover_tm_lsq: Y width != K");

  std::vector<Index> nonzero;
  for (Index i = 0; i < n; ++i) {
    bool any = false;
    for (Index j = 0; j < k && !any; ++j) any = xi(i, j) != 0;
    if (any) nonzero.push_back(i);
  }
  const Index r = static_cast<Index>(nonzero.size());
  if (r == 0) throw validation_error("recover_tm_lsq: xi is all zero");
  if (k < r) throw validation_error("recover_tm_lsq: fewer probes than unknowns");

  // Solve Xi_red^T A_red^T = Y^T; the real factorization serves both the
  // real and imaginary parts of Y.
  Eigen::MatrixXd xi_red_t(k, r);
  for (Index c = 0; c < r; ++c)
    for (Index j = 0; j < k; ++j)
      xi_red_t(j, c) = static_cast<double>(xi(nonzero[c], j));

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xi_red_t);
  if (cod.rank() < r) {
    std::string rows;
    const auto& perm = cod.colsPermutation().indices();
    for (Index i = cod.rank(); i < r; ++i) {
      if (!rows.empty()) rows += ", ";
      rows += std::to_string(nonzero[perm(i)]);
    }
    throw numerical_error("recover_tm_lsq: xi rows are rank deficient beyond the "
                          "zero rows; dependent rows: " + rows);
  }

  const Eigen::MatrixXd yt_re = y.real().transpose();
  const Eigen::MatrixXd yt_im = y.imag().transpose();
  const Eigen::MatrixXd at_re = cod.solve(yt_re);
  const Eigen::MatrixXd at_im = cod.solve(yt_im);

  MatC out = MatC::Zero(y.rows(), n);
  for (Index c = 0; c < r; ++c)
    for (Index m = 0; m < y.rows(); ++m)
      out(m, nonzero[c]) = cxd(at_re(c, m), at_im(c, m));
  return out;
}

RowAlignment best_row_alignment(const cxd* reference, const cxd* candidate, Index len) {
  double norm_ref = 0.0, norm_cand = 0.0;
  cxd inner_plain(0.0, 0.0), inner_conj(0.0, 0.0);
  for (Index j = 0; j < len; ++j) {
    norm_ref += std::norm(reference[j]);
    norm_cand += std::norm(candidate[j]);
    inner_plain += reference[j] * std::conj(candidate[j]);
    inner_conj += reference[j] * candidate[j];
  }

  const double res_plain = norm_ref + norm_cand - 2.0 * std::abs(inner_plain);
  const double res_conj = norm_ref + norm_cand - 2.0 * std::abs(inner_conj);

  RowAlignment best;
  best.conjugate = res_conj < res_plain;
  const cxd inner = best.conjugate ? inner_conj : inner_plain;
  best.phase = std::abs(inner) > 0.0 ? inner / std::abs(inner) : cxd(1.0, 0.0);
  best.residual_sq = std::max(0.0, best.conjugate ? res_conj : res_plain);
  return best;
}

RecoveredTM align_and_merge(const PartialTM& part1, const PartialTM& part2) {
  if (part1.columns.rows() != part2.columns.rows())
    throw validation_error("align_and_merge: row count mismatch");
  if (part1.n_total != part2.n_total)
    throw validation_error("align_and_merge: N mismatch");
  const Index m = part1.columns.rows();
  const Index n = part1.n_total;

  // Positions of the shared column indices inside each partial.
  std::vector<Index> shared1, shared2;
  {
    std::vector<Index> pos_in_1(n, -1);
    for (size_t i = 0; i < part1.column_indices.size(); ++i)
      pos_in_1[part1.column_indices[i]] = static_cast<Index>(i);
    for (size_t i = 0; i < part2.column_indices.size(); ++i) {
      const Index col = part2.column_indices[i];
      if (pos_in_1[col] >= 0) {
        shared1.push_back(pos_in_1[col]);
        shared2.push_back(static_cast<Index>(i));
      }
    }
  }
  const Index shared = static_cast<Index>(shared1.size());
  if (shared < min_shared_rows(n))
    throw validation_error("align_and_merge: shared columns below the alignment floor");

  RecoveredTM out;
  out.entries = MatC::Zero(m, n);
  out.provenance.assign(n, 0);
  out.alignment_residuals = VecD::Zero(m);
  out.conj_flags.assign(m, 0);
  out.phases = VecD::Zero(m);

  for (Index c : part1.column_indices) out.provenance[c] = 1;
  std::vector<char> only2(part2.column_indices.size(), 1);
  for (Index i = 0; i < shared; ++i) only2[shared2[i]] = 0;
  for (size_t i = 0; i < part2.column_indices.size(); ++i)
    if (only2[i]) out.provenance[part2.column_indices[i]] = 2;

  parallel_for(0, m, [&](std::int64_t row) {
    std::vector<cxd> u(shared), w(shared);
    for (Index i = 0; i < shared; ++i) {
      u[i] = part1.columns(row, shared1[i]);
      w[i] = part2.columns(row, shared2[i]);
    }
    const RowAlignment align = best_row_alignment(u.data(), w.data(), shared);
    double norm_u = 0.0;
    for (Index i = 0; i < shared; ++i) norm_u += std::norm(u[i]);
    out.alignment_residuals(row) =
        std::sqrt(align.residual_sq) / std::sqrt(std::max(norm_u, kNormEps));
    out.conj_flags[row] = align.conjugate ? 1 : 0;
    out.phases(row) = std::arg(align.phase);

    // part1 wins on shared columns; part2 contributes its exclusive ones
    // after the row transform.
    for (size_t i = 0; i < part1.column_indices.size(); ++i)
      out.entries(row, part1.column_indices[i]) = part1.columns(row, i);
    for (size_t i = 0; i < part2.column_indices.size(); ++i) {
      if (!only2[i]) continue;
      cxd v = part2.columns(row, i);
      if (align.conjugate) v = std::conj(v);
      out.entries(row, part2.column_indices[i]) = align.phase * v;
    }
  });

  for (Index row = 0; row < m; ++row)
    if (out.alignment_residuals(row) > kRejectThreshold) out.rejected_rows.push_back(row);
  out.shared_disagreement = out.alignment_residuals.mean();
  return out;
}

namespace {

double aligned_row_error_sq(const cxd* estimate, const cxd* truth, Index len) {
  return best_row_alignment(truth, estimate, len).residual_sq;
}

}  // namespace

double tm_relative_error(const MatC& estimate, const MatC& truth) {
  std::vector<Index> cols(truth.cols());
  for (Index c = 0; c < truth.cols(); ++c) cols[c] = c;
  return tm_relative_error(estimate, truth, cols);
}

double tm_relative_error(const MatC& estimate, const MatC& truth,
                         const std::vector<Index>& columns) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw validation_error("tm_relative_error: shape mismatch");
  TmErrorAccumulator acc(columns);
  acc.add_rows(estimate, truth);
  return acc.value();
}

void TmErrorAccumulator::add_rows(const MatC& estimate_rows, const MatC& truth_rows) {
  const Index m = estimate_rows.rows();
  const Index len = static_cast<Index>(columns_.size());
  std::vector<double> err(m), tn(m);
  parallel_for(0, m, [&](std::int64_t row) {
    std::vector<cxd> e(len), t(len);
    for (Index i = 0; i < len; ++i) {
      e[i] = estimate_rows(row, columns_[i]);
      t[i] = truth_rows(row, columns_[i]);
    }
    err[row] = aligned_row_error_sq(e.data(), t.data(), len);
    double norm_t = 0.0;
    for (Index i = 0; i < len; ++i) norm_t += std::norm(t[i]);
    tn[row] = norm_t;
  });
  for (Index row = 0; row < m; ++row) {
    err_sq_ += err[row];
    truth_sq_ += tn[row];
  }
}

double TmErrorAccumulator::value() const {
  if (truth_sq_ <= 0.0)
    throw validation_error("tm_relative_error: truth has zero norm");
  return std::sqrt(err_sq_ / truth_sq_);
}

}  // namespace numint
