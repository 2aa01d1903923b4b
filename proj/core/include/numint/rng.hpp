#pragma once

#include <cstdint>
#include <random>

namespace numint {

// splitmix64; used to derive independent substream seeds from one user seed.
std::uint64_t mix64(std::uint64_t x);

// Combine a base seed with a stream tag (row index, probe-set index, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic random source. mt19937_64 output is pinned by the standard;
// the distribution transforms are written out here because the std
// distributions are implementation-defined and we need bit-reproducible
// artifacts (byte-identical output files are part of the contract).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli_half() { return (engine_() >> 63) != 0; }

  // Standard normal via Box-Muller (cached second value).
  double gaussian();

  // Uniform integer in [0, n) by rejection; unbiased.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stateless per-index Gaussian, used for camera noise so that measurement
// stays a pure function of (seed, output entry index).
double counter_gaussian(std::uint64_t seed, std::uint64_t index);

}  // namespace numint
