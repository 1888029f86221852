#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace csbss {

/// An unsigned-byte IDX array: big-endian header (0x0000, type 0x08, rank,
/// then one u32 per dimension) followed by the row-major payload.
struct IdxArray {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;
};

/// Throws ParseError naming the byte offset for a bad magic, unsupported
/// element type, rank mismatch or truncated payload.
IdxArray decode_idx(std::span<const std::uint8_t> bytes, std::uint8_t expected_rank);

std::vector<std::uint8_t> encode_idx(const IdxArray& array);

/// Reads a file, inflating it when it starts with the gzip signature.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace csbss
