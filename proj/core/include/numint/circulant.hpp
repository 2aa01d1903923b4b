#pragma once

#include <memory>

#include "numint/types.hpp"

namespace numint {

// Unnormalized complex DFT of one fixed length, any composite size
// (the calibration designs use non-dyadic lengths like 0.5625*N).
// Plans are created once; execution is thread-safe on distinct buffers.
class Dft {
 public:
  explicit Dft(int n);
  ~Dft();
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  int size() const { return n_; }
  void forward(const cxd* in, cxd* out) const;
  void backward(const cxd* in, cxd* out) const;

 private:
  int n_;
  void* plan_fwd_;
  void* plan_bwd_;
};

// Eigenvalues of the circulant generated by `gen` (first column), i.e. the
// unnormalized DFT of the generator.
VecC circulant_spectrum(const Dft& dft, const VecD& gen);

double min_spectrum_magnitude(const VecC& spectrum);

// Dense n x n circulant with first column gen: C(i, j) = gen[(i - j) mod n].
MatD circulant_matrix(const VecD& gen);

// Row-vector products with a circulant, via two FFTs:
//   y * C        = DFT(spectrum .* IDFT(y)) / n
//   y * C^{-1}   = DFT(IDFT(y) ./ spectrum) / n
// `scratch` must hold n entries; `row` is transformed in place.
void row_times_circulant(const Dft& dft, const VecC& spectrum, cxd* row, cxd* scratch);
void row_times_circulant_inverse(const Dft& dft, const VecC& spectrum, cxd* row,
                                 cxd* scratch);

// Spectra of the two circulant blocks plus the mixing weights of the
// generalized right inverse [alpha*C_A^{-1}; beta*C_B^{-1}].
struct CirculantSpectrum {
  VecC lambda_a;
  VecC lambda_b;
  double alpha = 0.5;
  double beta = 0.5;

  Index block_size() const { return lambda_a.size(); }
};

CirculantSpectrum make_spectrum(const VecD& gen_a, const VecD& gen_b, double alpha);

// Test-support oracle: materializes [C1, C2] * [alpha*C1^{-1}; beta*C2^{-1}]
// and returns the max absolute deviation from the identity.
double right_inverse_check(const CirculantSpectrum& spectra, const VecD& gen_a,
                           const VecD& gen_b);

}  // namespace numint
