#include "numint/probes.hpp"

#include <algorithm>
#include <cmath>

#include "numint/circulant.hpp"
#include "numint/rng.hpp"

namespace numint {

namespace {

constexpr double kSpectrumFloor = 1e-9;
constexpr int kMaxGeneratorTries = 256;

VecD sample_invertible_generator(Rng& rng, Index n2, const Dft& dft) {
  for (int attempt = 0; attempt < kMaxGeneratorTries; ++attempt) {
    VecD gen(n2);
    for (Index i = 0; i < n2; ++i) gen(i) = rng.bernoulli_half() ? 1.0 : 0.0;
    const double lo = gen.sum();
    if (lo == 0.0 || lo == static_cast<double>(n2)) continue;  // all-zero / all-one
    if (min_spectrum_magnitude(circulant_spectrum(dft, gen)) < kSpectrumFloor) continue;
    return gen;
  }
  throw numerical_error("design_probe_set: could not sample an invertible generator");
}

std::vector<Index> shuffled_prefix(Rng& rng, std::vector<Index> pool, Index take) {
  for (Index i = 0; i < take; ++i) {
    const Index j = i + static_cast<Index>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return pool;
}

ProbeSet assemble_probe_set(Index n, const VecD& gen_a, const VecD& gen_b,
                            std::vector<Index> zero_rows, std::uint64_t seed) {
  const Index n2 = gen_a.size();
  std::sort(zero_rows.begin(), zero_rows.end());

  std::vector<char> is_zero(n, 0);
  for (Index z : zero_rows) is_zero[z] = 1;
  std::vector<Index> nonzero_rows;
  nonzero_rows.reserve(n2);
  for (Index i = 0; i < n; ++i)
    if (!is_zero[i]) nonzero_rows.push_back(i);

  ProbeSet set;
  set.xi = MatU8::Zero(n, 2 * n2);
  // Circulant blocks: C(i, j) = gen[(i - j) mod n2], columns are cyclic
  // down-shifts of the generator, re-spread over the nonzero rows.
  for (Index i = 0; i < n2; ++i) {
    const Index row = nonzero_rows[i];
    for (Index j = 0; j < n2; ++j) {
      const Index g = ((i - j) % n2 + n2) % n2;
      set.xi(row, j) = static_cast<std::uint8_t>(gen_a(g));
      set.xi(row, n2 + j) = static_cast<std::uint8_t>(gen_b(g));
    }
  }
  set.gen_a = gen_a;
  set.gen_b = gen_b;
  set.zero_rows = std::move(zero_rows);
  set.nonzero_rows = std::move(nonzero_rows);
  set.seed = seed;
  return set;
}

}  // namespace

ProbeSet design_probe_set(Index n, Index k, std::uint64_t seed) {
  if (k % 2 != 0) throw validation_error("design_probe_set: k must be even");
  const Index n2 = k / 2;
  if (n2 < 4 || n2 > n)
    throw validation_error("design_probe_set: need 4 <= k/2 <= n");

  Rng rng(seed);
  const Dft dft(static_cast<int>(n2));
  const VecD gen_a = sample_invertible_generator(rng, n2, dft);
  const VecD gen_b = sample_invertible_generator(rng, n2, dft);

  std::vector<Index> all(n);
  for (Index i = 0; i < n; ++i) all[i] = i;
  std::vector<Index> zero_rows = shuffled_prefix(rng, std::move(all), n - n2);

  return assemble_probe_set(n, gen_a, gen_b, std::move(zero_rows), seed);
}

Index min_shared_rows(Index n) {
  return std::max<Index>(8, static_cast<Index>(std::ceil(0.05 * static_cast<double>(n))));
}

std::pair<ProbeSet, ProbeSet> design_probe_pair(Index n, Index k, std::uint64_t seed) {
  ProbeSet first = design_probe_set(n, k, derive_seed(seed, 1));

  const Index n2 = k / 2;
  const std::uint64_t second_seed = derive_seed(seed, 2);
  Rng rng(second_seed);
  const Dft dft(static_cast<int>(n2));
  const VecD gen_a = sample_invertible_generator(rng, n2, dft);
  const VecD gen_b = sample_invertible_generator(rng, n2, dft);

  // Zero out rows the first set covered, but keep at least min_shared_rows
  // of its nonzero rows alive for the alignment step.
  const Index need_zero = n - n2;
  const Index from_first = std::min(need_zero, n2 - min_shared_rows(n));
  if (from_first < 0)
    throw validation_error("design_probe_pair: k too small to share rows");
  std::vector<Index> zero_rows = shuffled_prefix(rng, first.nonzero_rows, from_first);
  if (from_first < need_zero) {
    // Not enough coverage for the whole index set; the leftovers stay
    // unrecoverable in both sets.
    std::vector<Index> rest =
        shuffled_prefix(rng, first.zero_rows, need_zero - from_first);
    zero_rows.insert(zero_rows.end(), rest.begin(), rest.end());
  }

  ProbeSet second = assemble_probe_set(n, gen_a, gen_b, std::move(zero_rows), second_seed);
  return {std::move(first), std::move(second)};
}

AnchorSet design_anchor_pyramid(const std::vector<const ProbeSet*>& probes,
                                Index s_count, double fill_fraction,
                                std::uint64_t seed) {
  if (probes.empty()) throw validation_error("design_anchor_pyramid: no probe sets");
  if (s_count < 3) throw validation_error("design_anchor_pyramid: s_count must be >= 3");
  if (!(fill_fraction > 0.0 && fill_fraction < 1.0))
    throw validation_error("design_anchor_pyramid: fill_fraction must be in (0, 1)");

  const Index n = probes.front()->n();
  for (const ProbeSet* set : probes)
    if (set->n() != n) throw validation_error("design_anchor_pyramid: mixed N");

  // Support union of every probe column across the given sets.
  std::vector<char> support(n, 0);
  for (const ProbeSet* set : probes)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < set->k_count(); ++j)
        if (set->xi(i, j) != 0) {
          support[i] = 1;
          break;
        }

  std::vector<Index> zero_set;
  for (Index i = 0; i < n; ++i)
    if (!support[i]) zero_set.push_back(i);
  if (zero_set.empty())
    throw validation_error(
        "design_anchor_pyramid: probe supports cover every index; anchors would "
        "degenerate to all-ones");

  Rng rng(seed);
  const Index wanted = s_count - 1;  // nonzero anchors; the origin is free
  std::vector<std::vector<char>> grown;  // smallest support first
  std::vector<char> current = support;
  for (Index a = 0; a < wanted; ++a) {
    if (zero_set.empty())
      throw numerical_error("design_anchor_pyramid: zero set exhausted; max feasible "
                            "s_count = " + std::to_string(a + 1));
    const Index fill = static_cast<Index>(
        std::ceil(fill_fraction * static_cast<double>(zero_set.size())));
    for (Index f = 0; f < fill; ++f) {
      const Index pick = static_cast<Index>(rng.below(zero_set.size()));
      current[zero_set[pick]] = 1;
      zero_set.erase(zero_set.begin() + pick);
    }
    grown.push_back(current);
  }

  AnchorSet anchors;
  anchors.anchors = MatU8::Zero(n, s_count);
  // Largest support at index 0, origin at index S-1.
  for (Index a = 0; a < wanted; ++a) {
    const std::vector<char>& mask = grown[wanted - 1 - a];
    for (Index i = 0; i < n; ++i) anchors.anchors(i, a) = mask[i] ? 1 : 0;
  }
  return anchors;
}

namespace {

void require_anchor_probe_compat(const ProbeSet& probes, const AnchorSet& anchors) {
  const Index n = probes.n();
  const Index s = anchors.s_count();
  if (anchors.n() != n)
    throw validation_error("measurement_plan: anchors and probes disagree on N");
  if (s < 3) throw validation_error("measurement_plan: need at least 3 anchors");
  for (Index i = 0; i < n; ++i)
    if (anchors.anchors(i, s - 1) != 0)
      throw validation_error("measurement_plan: anchor S must be the origin");
  // Nested supports: v_s >= v_{s+1} elementwise.
  for (Index col = 0; col + 1 < s; ++col)
    for (Index i = 0; i < n; ++i)
      if (anchors.anchors(i, col) < anchors.anchors(i, col + 1))
        throw validation_error("measurement_plan: anchor supports are not nested");
  // Smallest nonzero anchor must dominate every probe column.
  for (Index i = 0; i < n; ++i) {
    if (anchors.anchors(i, s - 2) != 0) continue;
    for (Index j = 0; j < probes.k_count(); ++j)
      if (probes.xi(i, j) != 0)
        throw validation_error("measurement_plan: anchors do not dominate probes");
  }
}

}  // namespace

MeasurementPlan measurement_plan(const ProbeSet& probes, const AnchorSet& anchors) {
  require_anchor_probe_compat(probes, anchors);

  MeasurementPlan plan;
  plan.n = probes.n();
  plan.k_count = probes.k_count();
  plan.s_count = anchors.s_count();
  const Index s = plan.s_count;
  const Index k = plan.k_count;
  plan.entries.reserve((s - 1) + (s - 1) * (s - 2) / 2 + k + k * (s - 1));

  for (Index a = 0; a < s - 1; ++a)
    plan.entries.push_back({PlanRole::kAnchorMag, -1, a, -1});
  for (Index q = 0; q < s - 1; ++q)
    for (Index a = q + 1; a < s - 1; ++a)
      plan.entries.push_back({PlanRole::kAnchorPair, -1, a, q});
  for (Index p = 0; p < k; ++p)
    plan.entries.push_back({PlanRole::kProbeToOrigin, p, -1, -1});
  for (Index p = 0; p < k; ++p)
    for (Index a = 0; a < s - 1; ++a)
      plan.entries.push_back({PlanRole::kProbeToAnchor, p, a, -1});
  return plan;
}

MatD plan_matrix(const MeasurementPlan& plan, const ProbeSet& probes,
                 const AnchorSet& anchors) {
  MatD out(plan.n, plan.size());
  for (Index b = 0; b < plan.size(); ++b) {
    const PlanEntry& e = plan.entries[b];
    for (Index i = 0; i < plan.n; ++i) {
      double v = 0.0;
      switch (e.role) {
        case PlanRole::kAnchorMag:
          v = anchors.anchors(i, e.s);
          break;
        case PlanRole::kAnchorPair:
          v = static_cast<double>(anchors.anchors(i, e.q)) -
              static_cast<double>(anchors.anchors(i, e.s));
          break;
        case PlanRole::kProbeToOrigin:
          v = probes.xi(i, e.k);
          break;
        case PlanRole::kProbeToAnchor:
          v = static_cast<double>(anchors.anchors(i, e.s)) -
              static_cast<double>(probes.xi(i, e.k));
          break;
      }
      if (v != 0.0 && v != 1.0)
        throw numerical_error("plan_matrix: non-binary pattern (internal inconsistency)");
      out(i, b) = v;
    }
  }
  return out;
}

}  // namespace numint
