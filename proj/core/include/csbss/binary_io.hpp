#pragma once

// Fixed-endianness scalar I/O shared by the binary file formats.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

#include "csbss/errors.hpp"

namespace csbss::io {

template <typename T>
  requires std::is_arithmetic_v<T>
std::array<unsigned char, sizeof(T)> to_bytes(T value, std::endian order) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if (order != std::endian::native) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
  }
  return bytes;
}

template <typename T>
  requires std::is_arithmetic_v<T>
T from_bytes(const unsigned char* bytes, std::endian order) {
  std::array<unsigned char, sizeof(T)> tmp{};
  std::memcpy(tmp.data(), bytes, sizeof(T));
  if (order != std::endian::native) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(tmp[i], tmp[sizeof(T) - 1 - i]);
    }
  }
  T value;
  std::memcpy(&value, tmp.data(), sizeof(T));
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  const auto bytes = to_bytes(value, std::endian::little);
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, std::string_view what) {
  std::array<unsigned char, sizeof(T)> bytes{};
  const auto offset = static_cast<long long>(in.tellg());
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw ParseError("truncated input reading " + std::string(what) +
                     " at byte offset " + std::to_string(offset));
  }
  return from_bytes<T>(bytes.data(), std::endian::little);
}

void write_magic(std::ostream& out, std::string_view magic);
void expect_magic(std::istream& in, std::string_view magic);

}  // namespace csbss::io
