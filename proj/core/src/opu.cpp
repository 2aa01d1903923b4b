#include "numint/opu.hpp"

#include <cmath>

#include "numint/parallel.hpp"
#include "numint/rng.hpp"

namespace numint {

namespace {
constexpr std::uint64_t kNoiseTag = 0x6e6f697365ULL;  // noise substream
constexpr Index kRowBlock = 256;
}  // namespace

void CameraModel::validate() const {
  if (bits < 0 || bits > 16) throw validation_error("camera bits must be in [0, 16]");
  if (!(gain > 0.0)) throw validation_error("camera gain must be positive");
  if (noise_sigma < 0.0) throw validation_error("camera noise_sigma must be >= 0");
}

double apply_camera(const CameraModel& camera, double raw_intensity,
                    std::uint64_t noise_seed, std::uint64_t entry_index) {
  double v = camera.gain * raw_intensity;
  if (camera.noise_sigma > 0.0)
    v += camera.noise_sigma * counter_gaussian(noise_seed, entry_index);
  if (v < 0.0) v = 0.0;
  if (camera.bits > 0) {
    const double top = camera.quantized_max();
    if (v > top) v = top;
    v = std::floor(v + 0.5);
  }
  return v;
}

void require_binary(const MatD& inputs, const char* what) {
  for (Index i = 0; i < inputs.rows(); ++i)
    for (Index j = 0; j < inputs.cols(); ++j) {
      const double v = inputs(i, j);
      if (v != 0.0 && v != 1.0)
        throw validation_error(std::string(what) + ": inputs must be binary 0/1");
    }
}

SimulatedOpu SimulatedOpu::from_seed(Index m_rows, Index n_cols, std::uint64_t seed,
                                     CameraModel camera) {
  if (m_rows < 1 || n_cols < 1)
    throw validation_error("SimulatedOpu: dimensions must be >= 1");
  camera.validate();
  SimulatedOpu opu;
  opu.m_rows_ = m_rows;
  opu.n_cols_ = n_cols;
  opu.seed_ = seed;
  opu.noise_seed_ = derive_seed(seed, kNoiseTag);
  opu.camera_ = camera;
  return opu;
}

SimulatedOpu SimulatedOpu::inject(MatC entries, CameraModel camera) {
  if (entries.size() == 0) throw validation_error("inject: entries must be nonempty");
  camera.validate();
  SimulatedOpu opu;
  opu.m_rows_ = entries.rows();
  opu.n_cols_ = entries.cols();
  opu.noise_seed_ = derive_seed(0, kNoiseTag);
  opu.camera_ = camera;
  opu.injected_ = true;
  opu.injected_tm_ = std::move(entries);
  return opu;
}

SimulatedOpu SimulatedOpu::with_camera(CameraModel camera) const {
  camera.validate();
  SimulatedOpu opu = *this;
  opu.camera_ = camera;
  return opu;
}

MatC SimulatedOpu::tm_block(Index row_begin, Index row_end) const {
  if (row_begin < 0 || row_end > m_rows_ || row_begin > row_end)
    throw validation_error("tm_block: row range out of bounds");
  if (injected_) return injected_tm_.middleRows(row_begin, row_end - row_begin);

  MatC block(row_end - row_begin, n_cols_);
  // Independent real/imag components with variance 1/2, so E|a|^2 = 1.
  const double scale = std::sqrt(0.5);
  parallel_for(row_begin, row_end, [&](std::int64_t m) {
    Rng rng(derive_seed(seed_, static_cast<std::uint64_t>(m)));
    cxd* row = block.row(m - row_begin).data();
    for (Index j = 0; j < n_cols_; ++j) {
      const double re = rng.gaussian() * scale;
      const double im = rng.gaussian() * scale;
      row[j] = cxd(re, im);
    }
  });
  return block;
}

MatC SimulatedOpu::fields(const MatD& inputs) const {
  if (inputs.rows() != n_cols_)
    throw validation_error("fields: input column length != N");
  MatC out(m_rows_, inputs.cols());
  const MatC rhs = inputs.cast<cxd>();
  for (Index r0 = 0; r0 < m_rows_; r0 += kRowBlock) {
    const Index r1 = std::min(m_rows_, r0 + kRowBlock);
    out.middleRows(r0, r1 - r0).noalias() = tm_block(r0, r1) * rhs;
  }
  return out;
}

MatD SimulatedOpu::measure(const MatD& inputs) const {
  if (inputs.rows() != n_cols_)
    throw validation_error("measure: input column length != N");
  if (inputs.cols() < 1) throw validation_error("measure: batch must be nonempty");
  require_binary(inputs, "measure");

  const Index batch = inputs.cols();
  MatD out(m_rows_, batch);
  const MatC rhs = inputs.cast<cxd>();
  for (Index r0 = 0; r0 < m_rows_; r0 += kRowBlock) {
    const Index r1 = std::min(m_rows_, r0 + kRowBlock);
    const MatC block_fields = tm_block(r0, r1) * rhs;
    for (Index i = r0; i < r1; ++i)
      for (Index j = 0; j < batch; ++j) {
        const double raw = std::norm(block_fields(i - r0, j));
        out(i, j) = apply_camera(camera_, raw, noise_seed_,
                                 static_cast<std::uint64_t>(i * batch + j));
      }
  }
  return out;
}

}  // namespace numint
