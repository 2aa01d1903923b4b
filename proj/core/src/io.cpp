#include "numint/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace numint {

namespace {

constexpr char kMagic[8] = {'N', 'U', 'M', 'I', 'N', 'T', '0', '1'};

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) {
  put_u64(buf, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

double get_f64(const char* p) { return std::bit_cast<double>(get_u64(p)); }

void write_file(const std::filesystem::path& path, const std::string& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw validation_error("cannot open for writing: " + path.string());
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw validation_error("write failed: " + path.string());
}

std::string header(NifDtype dtype, Index rows, Index cols, size_t payload_bytes) {
  std::string buf;
  buf.reserve(25 + payload_bytes);
  buf.append(kMagic, 8);
  buf.push_back(static_cast<char>(dtype));
  put_u64(buf, static_cast<std::uint64_t>(rows));
  put_u64(buf, static_cast<std::uint64_t>(cols));
  return buf;
}

}  // namespace

void write_nif(const std::filesystem::path& path, const MatD& matrix) {
  std::string buf = header(NifDtype::kF64, matrix.rows(), matrix.cols(),
                           static_cast<size_t>(matrix.size()) * 8);
  for (Index i = 0; i < matrix.rows(); ++i)
    for (Index j = 0; j < matrix.cols(); ++j) put_f64(buf, matrix(i, j));
  write_file(path, buf);
}

void write_nif(const std::filesystem::path& path, const MatC& matrix) {
  std::string buf = header(NifDtype::kC128, matrix.rows(), matrix.cols(),
                           static_cast<size_t>(matrix.size()) * 16);
  for (Index i = 0; i < matrix.rows(); ++i)
    for (Index j = 0; j < matrix.cols(); ++j) {
      put_f64(buf, matrix(i, j).real());
      put_f64(buf, matrix(i, j).imag());
    }
  write_file(path, buf);
}

void write_nif(const std::filesystem::path& path, const MatU8& matrix) {
  std::string buf = header(NifDtype::kU8, matrix.rows(), matrix.cols(),
                           static_cast<size_t>(matrix.size()));
  for (Index i = 0; i < matrix.rows(); ++i)
    for (Index j = 0; j < matrix.cols(); ++j)
      buf.push_back(static_cast<char>(matrix(i, j)));
  write_file(path, buf);
}

NifData read_nif(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < 25 || std::memcmp(buf.data(), kMagic, 8) != 0)
    throw validation_error("not a NIF1 file: " + path.string());
  const auto dtype = static_cast<NifDtype>(buf[8]);
  const Index rows = static_cast<Index>(get_u64(buf.data() + 9));
  const Index cols = static_cast<Index>(get_u64(buf.data() + 17));
  if (rows < 0 || cols < 0) throw validation_error("bad NIF1 header: " + path.string());

  const size_t count = static_cast<size_t>(rows) * static_cast<size_t>(cols);
  const char* p = buf.data() + 25;
  const size_t avail = buf.size() - 25;

  NifData data;
  data.dtype = dtype;
  switch (dtype) {
    case NifDtype::kF64: {
      if (avail != count * 8) throw validation_error("truncated NIF1 f64 payload");
      data.f64.resize(rows, cols);
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j, p += 8) data.f64(i, j) = get_f64(p);
      break;
    }
    case NifDtype::kC128: {
      if (avail != count * 16) throw validation_error("truncated NIF1 c128 payload");
      data.c128.resize(rows, cols);
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j, p += 16)
          data.c128(i, j) = cxd(get_f64(p), get_f64(p + 8));
      break;
    }
    case NifDtype::kU8: {
      if (avail != count) throw validation_error("truncated NIF1 u8 payload");
      data.u8.resize(rows, cols);
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j, ++p)
          data.u8(i, j) = static_cast<std::uint8_t>(*p);
      break;
    }
    default:
      throw validation_error("unknown NIF1 dtype in " + path.string());
  }
  return data;
}

MatC read_nif_complex(const std::filesystem::path& path) {
  NifData data = read_nif(path);
  if (data.dtype != NifDtype::kC128)
    throw validation_error("expected complex NIF1 data: " + path.string());
  return std::move(data.c128);
}

MatD read_nif_real(const std::filesystem::path& path) {
  NifData data = read_nif(path);
  if (data.dtype == NifDtype::kF64) return std::move(data.f64);
  if (data.dtype == NifDtype::kU8) return data.u8.cast<double>();
  throw validation_error("expected real NIF1 data: " + path.string());
}

void write_kv(const std::filesystem::path& path,
              const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw validation_error("cannot open for writing: " + path.string());
  for (const auto& [key, value] : pairs) out << key << "=" << value << "\n";
}

std::map<std::string, std::string> read_kv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open: " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("bad key=value line in " + path.string() + ": " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string format_index_list(const std::vector<Index>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(values[i]);
  }
  return out;
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ','))
    if (!token.empty()) out.push_back(static_cast<Index>(std::stoll(token)));
  return out;
}

}  // namespace numint
