#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace csbss {

enum class DatasetKind { mnist, emnist_balanced };

std::string to_string(DatasetKind kind);
/// Accepts "mnist" and "emnist"; throws ParameterError otherwise.
DatasetKind parse_dataset_kind(const std::string& name);
std::size_t class_count(DatasetKind kind);

constexpr std::size_t kImageSide = 28;
constexpr std::size_t kImagePixels = kImageSide * kImageSide;

/// Images as columns of 784 pixels in [0, 1], row-major within an image.
struct ImageDataset {
  Eigen::MatrixXf images;  // 784 x N
  std::vector<int> labels;
  std::size_t class_count = 0;
  std::string split;  // "train", "test", "val"

  std::size_t size() const noexcept { return labels.size(); }
  /// Column subset in the given order.
  ImageDataset subset(std::span<const std::size_t> indices, std::string split_tag) const;
};

/// Decodes an image/label IDX pair. Pixels are scaled by 1/255. E-MNIST images
/// are stored transposed and are transposed back. For the balanced E-MNIST
/// split every class must appear equally often. Throws ParseError.
ImageDataset parse_idx(std::span<const std::uint8_t> image_bytes,
                       std::span<const std::uint8_t> label_bytes, DatasetKind kind,
                       std::string split);

/// Inverse of parse_idx at u8 precision: {images, labels} IDX byte streams.
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> encode_idx_dataset(
    const ImageDataset& dataset, DatasetKind kind);

struct DatasetFiles {
  std::filesystem::path images;
  std::filesystem::path labels;
};

/// Locates the IDX pair (raw or .gz) under `data_dir`/{mnist,emnist}/ or
/// `data_dir` itself. Returns nullopt when either file is missing.
std::optional<DatasetFiles> find_dataset_files(const std::filesystem::path& data_dir,
                                               DatasetKind kind, const std::string& split);

/// find_dataset_files + read + parse_idx. Throws ParseError when files are absent.
ImageDataset load_dataset(const std::filesystem::path& data_dir, DatasetKind kind,
                          const std::string& split);

/// Seeded shuffle, then the first round(val_fraction * N) indices become the
/// validation split. Throws ParameterError when either side would be empty.
std::pair<ImageDataset, ImageDataset> make_splits(const ImageDataset& train, double val_fraction,
                                                  std::uint64_t seed);

/// Index form of make_splits: (train indices, validation indices).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            double val_fraction,
                                                                            std::uint64_t seed);

struct ChecksumEntry {
  std::string file;     // file name without .gz
  std::string sha256;   // of the decompressed bytes
};

/// Reference checksums of the published MNIST IDX files.
std::span<const ChecksumEntry> mnist_checksums();

struct FileCheck {
  std::string file;
  bool present = false;
  std::optional<bool> checksum_ok;  // nullopt when no reference checksum exists
  bool structure_ok = false;
  std::string detail;
};

/// Validates the dataset files under `data_dir`: presence, IDX structure and,
/// where a reference exists, the SHA-256 of the decompressed contents.
std::vector<FileCheck> check_dataset_files(const std::filesystem::path& data_dir, DatasetKind kind);

}  // namespace csbss
