#include "csbss/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "csbss/content_hash.hpp"
#include "csbss/errors.hpp"
#include "csbss/idx.hpp"
#include "csbss/rng.hpp"

namespace csbss {

namespace {

const std::array<ChecksumEntry, 4> kMnistChecksums{{
    {"train-images-idx3-ubyte", "ba891046e6505d7aadcbbe25680a0738ad16aec93bde7f9b65e87a2fc25776db"},
    {"train-labels-idx1-ubyte", "65a50cbbf4e906d70832878ad85ccda5333a97f0f4c3dd2ef09a8a9eef7101c5"},
    {"t10k-images-idx3-ubyte", "0fa7898d509279e482958e8ce81c8e77db3f2f8254e26661ceb7762c4d494ce7"},
    {"t10k-labels-idx1-ubyte", "ff7bcfd416de33731a308c3f266cc351222c34898ecbeaf847f06e48f7ec33f2"},
}};

std::string file_stem(DatasetKind kind, const std::string& split, bool images) {
  const char* part = images ? "images-idx3-ubyte" : "labels-idx1-ubyte";
  if (kind == DatasetKind::mnist) {
    if (split != "train" && split != "test") throw ParameterError("unknown split " + split);
    return std::string(split == "train" ? "train-" : "t10k-") + part;
  }
  if (split != "train" && split != "test") throw ParameterError("unknown split " + split);
  return "emnist-balanced-" + split + "-" + part;
}

std::optional<std::filesystem::path> locate(const std::filesystem::path& data_dir,
                                            DatasetKind kind, const std::string& stem) {
  const std::filesystem::path sub = kind == DatasetKind::mnist ? "mnist" : "emnist";
  for (const auto& dir : {data_dir / sub, data_dir}) {
    for (const auto& name : {stem, stem + ".gz"}) {
      if (std::filesystem::exists(dir / name)) return dir / name;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(DatasetKind kind) {
  return kind == DatasetKind::mnist ? "mnist" : "emnist";
}

DatasetKind parse_dataset_kind(const std::string& name) {
  if (name == "mnist") return DatasetKind::mnist;
  if (name == "emnist" || name == "emnist-balanced") return DatasetKind::emnist_balanced;
  throw ParameterError("unknown dataset '" + name + "' (expected mnist or emnist)");
}

std::size_t class_count(DatasetKind kind) { return kind == DatasetKind::mnist ? 10 : 47; }

ImageDataset ImageDataset::subset(std::span<const std::size_t> indices, std::string split_tag) const {
  ImageDataset out;
  out.images.resize(images.rows(), static_cast<Eigen::Index>(indices.size()));
  out.labels.reserve(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    out.images.col(static_cast<Eigen::Index>(j)) = images.col(static_cast<Eigen::Index>(indices[j]));
    out.labels.push_back(labels[indices[j]]);
  }
  out.class_count = class_count;
  out.split = std::move(split_tag);
  return out;
}

ImageDataset parse_idx(std::span<const std::uint8_t> image_bytes,
                       std::span<const std::uint8_t> label_bytes, DatasetKind kind,
                       std::string split) {
  const IdxArray images = decode_idx(image_bytes, 3);
  const IdxArray labels = decode_idx(label_bytes, 1);
  if (images.dims[1] != kImageSide || images.dims[2] != kImageSide) {
    throw ParseError("IDX: expected 28x28 images at byte offset 8, found " +
                     std::to_string(images.dims[1]) + "x" + std::to_string(images.dims[2]));
  }
  if (images.dims[0] != labels.dims[0]) {
    throw ParseError("IDX: image count " + std::to_string(images.dims[0]) +
                     " does not match label count " + std::to_string(labels.dims[0]) +
                     " (byte offset 4)");
  }
  const std::size_t n = images.dims[0];
  const std::size_t classes = class_count(kind);
  ImageDataset ds;
  ds.class_count = classes;
  ds.split = std::move(split);
  ds.images.resize(kImagePixels, static_cast<Eigen::Index>(n));
  ds.labels.resize(n);
  const bool transposed = kind == DatasetKind::emnist_balanced;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* px = images.data.data() + i * kImagePixels;
    auto col = ds.images.col(static_cast<Eigen::Index>(i));
    for (std::size_t r = 0; r < kImageSide; ++r) {
      for (std::size_t c = 0; c < kImageSide; ++c) {
        const std::size_t src = transposed ? c * kImageSide + r : r * kImageSide + c;
        col(static_cast<Eigen::Index>(r * kImageSide + c)) = static_cast<float>(px[src]) / 255.0f;
      }
    }
    const int label = labels.data[i];
    if (static_cast<std::size_t>(label) >= classes) {
      throw ParseError("IDX: label " + std::to_string(label) + " out of range at byte offset " +
                       std::to_string(8 + i));
    }
    ds.labels[i] = label;
  }
  if (kind == DatasetKind::emnist_balanced) {
    std::vector<std::size_t> histogram(classes, 0);
    for (int l : ds.labels) ++histogram[static_cast<std::size_t>(l)];
    if (std::adjacent_find(histogram.begin(), histogram.end(), std::not_equal_to<>()) !=
        histogram.end()) {
      throw ParseError("E-MNIST balanced: class histogram is not uniform");
    }
  }
  return ds;
}

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> encode_idx_dataset(
    const ImageDataset& dataset, DatasetKind kind) {
  const std::size_t n = dataset.size();
  IdxArray images{{static_cast<std::uint32_t>(n), kImageSide, kImageSide}, {}};
  IdxArray labels{{static_cast<std::uint32_t>(n)}, {}};
  images.data.resize(n * kImagePixels);
  const bool transposed = kind == DatasetKind::emnist_balanced;
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = dataset.images.col(static_cast<Eigen::Index>(i));
    for (std::size_t r = 0; r < kImageSide; ++r) {
      for (std::size_t c = 0; c < kImageSide; ++c) {
        const std::size_t dst = transposed ? c * kImageSide + r : r * kImageSide + c;
        const float v = std::clamp(col(static_cast<Eigen::Index>(r * kImageSide + c)), 0.0f, 1.0f);
        images.data[i * kImagePixels + dst] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
      }
    }
    labels.data.push_back(static_cast<std::uint8_t>(dataset.labels[i]));
  }
  return {encode_idx(images), encode_idx(labels)};
}

std::optional<DatasetFiles> find_dataset_files(const std::filesystem::path& data_dir,
                                               DatasetKind kind, const std::string& split) {
  auto images = locate(data_dir, kind, file_stem(kind, split, true));
  auto labels = locate(data_dir, kind, file_stem(kind, split, false));
  if (!images || !labels) return std::nullopt;
  return DatasetFiles{*images, *labels};
}

ImageDataset load_dataset(const std::filesystem::path& data_dir, DatasetKind kind,
                          const std::string& split) {
  const auto files = find_dataset_files(data_dir, kind, split);
  if (!files) {
    throw ParseError(to_string(kind) + " " + split + " files not found under " + data_dir.string() +
                     " (expected " + file_stem(kind, split, true) + "[.gz])");
  }
  const auto image_bytes = read_file_bytes(files->images);
  const auto label_bytes = read_file_bytes(files->labels);
  return parse_idx(image_bytes, label_bytes, kind, split);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            double val_fraction,
                                                                            std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ParameterError("validation fraction must lie in (0, 1)");
  }
  const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(n)));
  if (n_val == 0 || n_val >= n) {
    throw ParameterError("validation fraction " + std::to_string(val_fraction) + " on " +
                         std::to_string(n) + " samples leaves an empty split");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  return {std::move(train), std::move(val)};
}

std::pair<ImageDataset, ImageDataset> make_splits(const ImageDataset& train, double val_fraction,
                                                  std::uint64_t seed) {
  const auto [train_idx, val_idx] = split_indices(train.size(), val_fraction, seed);
  return {train.subset(train_idx, "train"), train.subset(val_idx, "val")};
}

std::span<const ChecksumEntry> mnist_checksums() { return kMnistChecksums; }

std::vector<FileCheck> check_dataset_files(const std::filesystem::path& data_dir, DatasetKind kind) {
  std::vector<FileCheck> checks;
  for (const std::string split : {"train", "test"}) {
    for (bool images : {true, false}) {
      FileCheck check;
      check.file = file_stem(kind, split, images);
      const auto path = locate(data_dir, kind, check.file);
      if (!path) {
        check.detail = "missing";
        checks.push_back(check);
        continue;
      }
      check.present = true;
      try {
        const auto bytes = read_file_bytes(*path);
        decode_idx(bytes, images ? 3 : 1);
        check.structure_ok = true;
        if (kind == DatasetKind::mnist) {
          for (const auto& ref : kMnistChecksums) {
            if (ref.file == check.file) check.checksum_ok = sha256_hex(bytes) == ref.sha256;
          }
        }
        check.detail = check.checksum_ok.has_value()
                           ? (*check.checksum_ok ? "ok" : "checksum mismatch")
                           : "structure ok (no reference checksum)";
      } catch (const Error& e) {
        check.detail = e.what();
      }
      checks.push_back(check);
    }
  }
  return checks;
}

}  // namespace csbss
