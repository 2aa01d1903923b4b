#pragma once

#include <cstdint>

#include "numint/types.hpp"

namespace numint {

// Camera readout model: intensities are scaled by `gain`, optionally get
// additive Gaussian noise, are clipped at 0 and, for bits > 0, clipped to
// [0, 2^bits - 1] and rounded half up.
struct CameraModel {
  int bits = 0;           // 0 = no quantization
  double gain = 1.0;      // one exposure setting per experiment
  double noise_sigma = 0.0;

  void validate() const;
  double quantized_max() const { return static_cast<double>((1u << bits) - 1); }
};

double apply_camera(const CameraModel& camera, double raw_intensity,
                    std::uint64_t noise_seed, std::uint64_t entry_index);

// Simulated optical processing unit: an iid standard complex Gaussian
// transmission matrix applied to binary DMD patterns, with squared-magnitude
// readout. Immutable after construction; measurement is a pure function of
// (opu, inputs). Seeded instances generate TM rows on demand from per-row
// substreams, so large TMs never have to be materialized.
class SimulatedOpu {
 public:
  static SimulatedOpu from_seed(Index m_rows, Index n_cols, std::uint64_t seed,
                                CameraModel camera);
  // Test fixture: simulator whose TM equals `entries` exactly.
  static SimulatedOpu inject(MatC entries, CameraModel camera);

  Index rows() const { return m_rows_; }
  Index cols() const { return n_cols_; }
  std::uint64_t seed() const { return seed_; }
  const CameraModel& camera() const { return camera_; }
  std::uint64_t noise_seed() const { return noise_seed_; }

  // Same TM, different readout stage.
  SimulatedOpu with_camera(CameraModel camera) const;

  // Ground-truth rows [row_begin, row_end); generated or sliced.
  MatC tm_block(Index row_begin, Index row_end) const;
  MatC tm_dense() const { return tm_block(0, m_rows_); }

  // Camera readout |A * inputs|^2 for a binary N x B batch.
  MatD measure(const MatD& inputs) const;

  // Complex fields A * inputs; simulator-side oracle for tests and for the
  // difference-pattern fast path (|A(u - v)|^2 == |Au - Av|^2).
  MatC fields(const MatD& inputs) const;

 private:
  SimulatedOpu() = default;

  Index m_rows_ = 0;
  Index n_cols_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t noise_seed_ = 0;
  CameraModel camera_;
  bool injected_ = false;
  MatC injected_tm_;
};

// Throws unless every entry is exactly 0.0 or 1.0 (DMD patterns are binary).
void require_binary(const MatD& inputs, const char* what);

}  // namespace numint
