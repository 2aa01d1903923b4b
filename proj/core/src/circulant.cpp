#include "numint/circulant.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace numint {

namespace {
// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Dft::Dft(int n) : n_(n) {
  if (n < 1) throw validation_error("Dft: length must be >= 1");
  std::lock_guard<std::mutex> lock(planner_mutex());
  std::vector<fftw_complex> in(n), out(n);
  // FFTW_UNALIGNED so the plans apply to any caller buffer; FFTW_ESTIMATE so
  // the chosen algorithm (and hence rounding) is reproducible run to run.
  plan_fwd_ = fftw_plan_dft_1d(n, in.data(), out.data(), FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_bwd_ = fftw_plan_dft_1d(n, in.data(), out.data(), FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_fwd_ || !plan_bwd_) throw numerical_error("Dft: fftw planning failed");
}

Dft::~Dft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Dft::forward(const cxd* in, cxd* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<cxd*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void Dft::backward(const cxd* in, cxd* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<cxd*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

VecC circulant_spectrum(const Dft& dft, const VecD& gen) {
  if (gen.size() != dft.size())
    throw validation_error("circulant_spectrum: generator length mismatch");
  VecC in = gen.cast<cxd>();
  VecC out(gen.size());
  dft.forward(in.data(), out.data());
  return out;
}

double min_spectrum_magnitude(const VecC& spectrum) {
  return spectrum.cwiseAbs().minCoeff();
}

MatD circulant_matrix(const VecD& gen) {
  const Index n = gen.size();
  MatD c(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) c(i, j) = gen(((i - j) % n + n) % n);
  return c;
}

void row_times_circulant(const Dft& dft, const VecC& spectrum, cxd* row, cxd* scratch) {
  const int n = dft.size();
  dft.backward(row, scratch);
  for (int i = 0; i < n; ++i) scratch[i] *= spectrum(i);
  dft.forward(scratch, row);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int i = 0; i < n; ++i) row[i] *= inv_n;
}

void row_times_circulant_inverse(const Dft& dft, const VecC& spectrum, cxd* row,
                                 cxd* scratch) {
  const int n = dft.size();
  dft.backward(row, scratch);
  for (int i = 0; i < n; ++i) scratch[i] /= spectrum(i);
  dft.forward(scratch, row);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int i = 0; i < n; ++i) row[i] *= inv_n;
}

CirculantSpectrum make_spectrum(const VecD& gen_a, const VecD& gen_b, double alpha) {
  if (gen_a.size() != gen_b.size())
    throw validation_error("make_spectrum: generator lengths differ");
  Dft dft(static_cast<int>(gen_a.size()));
  CirculantSpectrum s;
  s.lambda_a = circulant_spectrum(dft, gen_a);
  s.lambda_b = circulant_spectrum(dft, gen_b);
  s.alpha = alpha;
  s.beta = 1.0 - alpha;
  return s;
}

double right_inverse_check(const CirculantSpectrum& spectra, const VecD& gen_a,
                           const VecD& gen_b) {
  const Index n = gen_a.size();
  const Dft dft(static_cast<int>(n));

  // First column of C^{-1} = IDFT(1 ./ spectrum); real for real circulants.
  auto inverse_circulant = [&](const VecC& spectrum) {
    VecC recip = spectrum.cwiseInverse();
    VecC col(n);
    dft.backward(recip.data(), col.data());
    MatC inv(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) inv(i, j) = col(((i - j) % n + n) % n) / double(n);
    return inv;
  };

  const MatC c1 = circulant_matrix(gen_a).cast<cxd>();
  const MatC c2 = circulant_matrix(gen_b).cast<cxd>();
  const MatC product = spectra.alpha * (c1 * inverse_circulant(spectra.lambda_a)) +
                       spectra.beta * (c2 * inverse_circulant(spectra.lambda_b));
  return (product - MatC::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace numint
