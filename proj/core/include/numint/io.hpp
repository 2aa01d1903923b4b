#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "numint/types.hpp"

namespace numint {

// NIF1 matrix container: 8-byte magic "NUMINT01", u8 dtype code
// (1 = f64, 2 = complex128 interleaved re/im, 3 = u8), u64 rows, u64 cols,
// all little-endian, then the row-major payload.
enum class NifDtype : std::uint8_t { kF64 = 1, kC128 = 2, kU8 = 3 };

void write_nif(const std::filesystem::path& path, const MatD& matrix);
void write_nif(const std::filesystem::path& path, const MatC& matrix);
void write_nif(const std::filesystem::path& path, const MatU8& matrix);

struct NifData {
  NifDtype dtype;
  MatD f64;
  MatC c128;
  MatU8 u8;
};

NifData read_nif(const std::filesystem::path& path);

// Strict-dtype conveniences (u8 promotes to real).
MatC read_nif_complex(const std::filesystem::path& path);
MatD read_nif_real(const std::filesystem::path& path);

// key=value sidecar files (one pair per line, # comments ignored).
void write_kv(const std::filesystem::path& path,
              const std::vector<std::pair<std::string, std::string>>& pairs);
std::map<std::string, std::string> read_kv(const std::filesystem::path& path);

std::string format_index_list(const std::vector<Index>& values);
std::vector<Index> parse_index_list(const std::string& text);

}  // namespace numint
