#include "numint/bundle.hpp"

#include <vector>

#include "numint/circulant.hpp"
#include "numint/parallel.hpp"

namespace numint {

Index IntensityBundle::pair_index(Index q, Index s, Index s_count) {
  // pairs (q, s), q < s < S-1, lexicographic
  const Index nz = s_count - 1;
  return q * (nz - 1) - q * (q - 1) / 2 + (s - q - 1);
}

IntensityBundle unpack_bundle(const MeasurementPlan& plan, const MatD& intensities) {
  if (intensities.cols() != plan.size())
    throw validation_error("unpack_bundle: batch width does not match the plan");
  const Index m = intensities.rows();
  const Index s = plan.s_count;
  const Index k = plan.k_count;

  IntensityBundle bundle;
  bundle.s_count = s;
  bundle.k_count = k;
  bundle.probe_to_anchor.resize(m, k * (s - 1));
  bundle.probe_to_origin.resize(m, k);
  bundle.anchor_mags.resize(m, s - 1);
  bundle.anchor_pairs.resize(m, (s - 1) * (s - 2) / 2);

  for (Index b = 0; b < plan.size(); ++b) {
    const PlanEntry& e = plan.entries[b];
    switch (e.role) {
      case PlanRole::kAnchorMag:
        bundle.anchor_mags.col(e.s) = intensities.col(b);
        break;
      case PlanRole::kAnchorPair:
        bundle.anchor_pairs.col(IntensityBundle::pair_index(e.q, e.s, s)) =
            intensities.col(b);
        break;
      case PlanRole::kProbeToOrigin:
        bundle.probe_to_origin.col(e.k) = intensities.col(b);
        break;
      case PlanRole::kProbeToAnchor:
        bundle.probe_to_anchor.col(e.k * (s - 1) + e.s) = intensities.col(b);
        break;
    }
  }
  return bundle;
}

namespace {

// Computes the fields for TM rows [row_begin, row_end) and emits every plan
// intensity as (local_row, plan_position, raw_value), in plan order per row.
template <typename Emit>
void walk_bundle_rows(const SimulatedOpu& opu, const ProbeSet& probes,
                      const AnchorSet& anchors, Index row_begin, Index row_end,
                      Emit&& emit) {
  const Index n2 = probes.half_k();
  const Index k = probes.k_count();
  const Index s = anchors.s_count();
  const Index pair_count = (s - 1) * (s - 2) / 2;

  const Index off_pair = s - 1;
  const Index off_probe = off_pair + pair_count;
  const Index off_pa = off_probe + k;

  const Dft dft(static_cast<int>(n2));
  const VecC lambda_a = circulant_spectrum(dft, probes.gen_a);
  const VecC lambda_b = circulant_spectrum(dft, probes.gen_b);

  const MatC tm_rows = opu.tm_block(row_begin, row_end);
  const MatC anchor_cols =
      anchors.anchors.leftCols(s - 1).cast<double>().cast<cxd>().eval();
  MatC anchor_fields(tm_rows.rows(), s - 1);
  anchor_fields.noalias() = tm_rows * anchor_cols;

  parallel_for(0, row_end - row_begin, [&](std::int64_t i) {
    std::vector<cxd> ya(n2), yb(n2), scratch(n2);
    const cxd* tm_row = tm_rows.row(i).data();
    for (Index j = 0; j < n2; ++j) {
      ya[j] = tm_row[probes.nonzero_rows[j]];
      yb[j] = ya[j];
    }
    // probe fields: (a restricted to nonzero rows) * [C_A, C_B]
    row_times_circulant(dft, lambda_a, ya.data(), scratch.data());
    row_times_circulant(dft, lambda_b, yb.data(), scratch.data());
    auto probe_field = [&](Index p) { return p < n2 ? ya[p] : yb[p - n2]; };

    const cxd* r_fields = anchor_fields.row(i).data();
    for (Index a = 0; a < s - 1; ++a) emit(i, a, std::norm(r_fields[a]));
    for (Index q = 0; q < s - 1; ++q)
      for (Index a = q + 1; a < s - 1; ++a)
        emit(i, off_pair + IntensityBundle::pair_index(q, a, s),
             std::norm(r_fields[q] - r_fields[a]));
    for (Index p = 0; p < k; ++p) emit(i, off_probe + p, std::norm(probe_field(p)));
    for (Index p = 0; p < k; ++p) {
      const cxd y = probe_field(p);
      for (Index a = 0; a < s - 1; ++a)
        emit(i, off_pa + p * (s - 1) + a, std::norm(r_fields[a] - y));
    }
  });
}

}  // namespace

IntensityBundle simulate_bundle_rows(const SimulatedOpu& opu, const ProbeSet& probes,
                                     const AnchorSet& anchors, Index row_begin,
                                     Index row_end) {
  if (probes.n() != opu.cols())
    throw validation_error("simulate_bundle: probes and OPU disagree on N");
  const Index k = probes.k_count();
  const Index s = anchors.s_count();
  const Index pair_count = (s - 1) * (s - 2) / 2;
  const Index batch = (s - 1) + pair_count + k + k * (s - 1);
  const Index m = row_end - row_begin;

  const Index off_pair = s - 1;
  const Index off_probe = off_pair + pair_count;
  const Index off_pa = off_probe + k;

  IntensityBundle bundle;
  bundle.s_count = s;
  bundle.k_count = k;
  bundle.probe_to_anchor.resize(m, k * (s - 1));
  bundle.probe_to_origin.resize(m, k);
  bundle.anchor_mags.resize(m, s - 1);
  bundle.anchor_pairs.resize(m, pair_count);

  const CameraModel& camera = opu.camera();
  const std::uint64_t noise_seed = opu.noise_seed();

  walk_bundle_rows(opu, probes, anchors, row_begin, row_end,
                   [&](Index i, Index pos, double raw) {
                     const std::uint64_t entry =
                         static_cast<std::uint64_t>((row_begin + i) * batch + pos);
                     const double v = apply_camera(camera, raw, noise_seed, entry);
                     if (pos < off_pair)
                       bundle.anchor_mags(i, pos) = v;
                     else if (pos < off_probe)
                       bundle.anchor_pairs(i, pos - off_pair) = v;
                     else if (pos < off_pa)
                       bundle.probe_to_origin(i, pos - off_probe) = v;
                     else
                       bundle.probe_to_anchor(i, pos - off_pa) = v;
                   });
  return bundle;
}

IntensityBundle simulate_bundle(const SimulatedOpu& opu, const ProbeSet& probes,
                                const AnchorSet& anchors) {
  return simulate_bundle_rows(opu, probes, anchors, 0, opu.rows());
}

double max_raw_intensity_rows(const SimulatedOpu& opu, const ProbeSet& probes,
                              const AnchorSet& anchors, Index row_begin,
                              Index row_end) {
  const Index m = row_end - row_begin;
  std::vector<double> row_max(m, 0.0);
  walk_bundle_rows(opu, probes, anchors, row_begin, row_end,
                   [&](Index i, Index, double raw) {
                     if (raw > row_max[i]) row_max[i] = raw;
                   });
  double max_raw = 0.0;
  for (double v : row_max) max_raw = std::max(max_raw, v);
  return max_raw;
}

}  // namespace numint
