#include "csbss/idx.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include <zlib.h>

#include "csbss/errors.hpp"

namespace csbss {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& compressed) {
  z_stream stream{};
  if (inflateInit2(&stream, 15 + 32) != Z_OK) throw ParseError("gzip: inflateInit failed");
  stream.next_in = const_cast<Bytef*>(compressed.data());
  stream.avail_in = static_cast<uInt>(compressed.size());
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[1 << 16];
  int status = Z_OK;
  while (status != Z_STREAM_END) {
    stream.next_out = chunk;
    stream.avail_out = sizeof(chunk);
    status = inflate(&stream, Z_NO_FLUSH);
    if (status != Z_OK && status != Z_STREAM_END) {
      const auto offset = stream.total_in;
      inflateEnd(&stream);
      throw ParseError("gzip: corrupt stream near compressed byte offset " + std::to_string(offset));
    }
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - stream.avail_out));
    if (status == Z_OK && stream.avail_in == 0 && stream.avail_out != 0) {
      inflateEnd(&stream);
      throw ParseError("gzip: truncated stream");
    }
  }
  inflateEnd(&stream);
  return out;
}

}  // namespace

IdxArray decode_idx(std::span<const std::uint8_t> bytes, std::uint8_t expected_rank) {
  if (bytes.size() < 4) throw ParseError("IDX: truncated magic at byte offset 0");
  if (bytes[0] != 0 || bytes[1] != 0) throw ParseError("IDX: bad magic at byte offset 0");
  if (bytes[2] != 0x08) {
    throw ParseError("IDX: unsupported element type " + std::to_string(bytes[2]) +
                     " at byte offset 2");
  }
  if (bytes[3] != expected_rank) {
    throw ParseError("IDX: expected rank " + std::to_string(expected_rank) + ", found " +
                     std::to_string(bytes[3]) + " at byte offset 3");
  }
  const std::size_t header = 4 + 4 * static_cast<std::size_t>(expected_rank);
  if (bytes.size() < header) {
    throw ParseError("IDX: truncated dimension header at byte offset " + std::to_string(bytes.size()));
  }
  IdxArray array;
  std::size_t count = 1;
  for (std::size_t i = 0; i < expected_rank; ++i) {
    array.dims.push_back(read_be32(bytes, 4 + 4 * i));
    count *= array.dims.back();
  }
  if (bytes.size() - header < count) {
    throw ParseError("IDX: payload truncated at byte offset " + std::to_string(bytes.size()) +
                     ", expected " + std::to_string(header + count) + " bytes");
  }
  if (bytes.size() - header > count) {
    throw ParseError("IDX: " + std::to_string(bytes.size() - header - count) +
                     " trailing bytes after offset " + std::to_string(header + count));
  }
  array.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return array;
}

std::vector<std::uint8_t> encode_idx(const IdxArray& array) {
  std::vector<std::uint8_t> out{0, 0, 0x08, static_cast<std::uint8_t>(array.dims.size())};
  for (auto d : array.dims) append_be32(out, d);
  out.insert(out.end(), array.data.begin(), array.data.end());
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) return gunzip(bytes);
  return bytes;
}

}  // namespace csbss
