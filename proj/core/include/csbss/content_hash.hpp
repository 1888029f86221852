#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace csbss {

/// Git-style blob hash: hex SHA-1 of "blob <size>\0" followed by the bytes.
std::string git_blob_hash(std::span<const unsigned char> bytes);
std::string git_blob_hash_file(const std::filesystem::path& path);

/// Same hash over the raw bytes of a parameter vector.
std::string parameter_hash(const Eigen::VectorXf& parameters);

/// Hex SHA-256 of a byte range.
std::string sha256_hex(std::span<const unsigned char> bytes);

}  // namespace csbss
