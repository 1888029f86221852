#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace csbss {

/// Number of measurements kept at a given sensing rate: floor(rate * D).
std::size_t measurement_count(std::size_t ambient_dim, double sensing_rate);

/// Dense d x D Bernoulli measurement operator with entries +-1/sqrt(d).
///
/// Signs come from a counter-based generator keyed by the seed and filled in
/// row-major order, so (seed, D, rate) fully determines the matrix on every
/// platform. Every column has unit Euclidean norm. Instances are immutable.
class SensingMatrix {
 public:
  /// Throws ParameterError for rate outside (0, 1], D == 0 or floor(rate*D) == 0.
  static SensingMatrix generate(std::uint64_t seed, std::size_t ambient_dim,
                                double sensing_rate);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
  std::uint64_t seed() const noexcept { return seed_; }
  double sensing_rate() const noexcept { return sensing_rate_; }
  const Eigen::MatrixXd& matrix() const noexcept { return entries_; }

  /// y = Phi x. Throws DimensionError unless x has length cols().
  Eigen::VectorXd compress(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Compresses every column of a D x n matrix.
  Eigen::MatrixXd compress_columns(const Eigen::Ref<const Eigen::MatrixXd>& x) const;

  /// Binary "CSPM" file: magic, u16 version, u32 d, u32 D, u64 seed, f64 rate,
  /// then d*D little-endian f32 entries in row-major order.
  void save(const std::filesystem::path& path) const;
  static SensingMatrix load(const std::filesystem::path& path);

  friend bool operator==(const SensingMatrix& a, const SensingMatrix& b) {
    return a.seed_ == b.seed_ && a.sensing_rate_ == b.sensing_rate_ &&
           a.entries_.rows() == b.entries_.rows() && a.entries_.cols() == b.entries_.cols() &&
           a.entries_ == b.entries_;
  }

 private:
  SensingMatrix(Eigen::MatrixXd entries, std::uint64_t seed, double rate)
      : entries_(std::move(entries)), seed_(seed), sensing_rate_(rate) {}

  Eigen::MatrixXd entries_;
  std::uint64_t seed_ = 0;
  double sensing_rate_ = 1.0;
};

/// Free-function form of SensingMatrix::compress.
Eigen::VectorXd compress(const SensingMatrix& phi, const Eigen::Ref<const Eigen::VectorXd>& x);

struct RipReport {
  double max_distortion = 0.0;       // max over trials of | ||Phi x||^2 - 1 |
  std::vector<double> distortions;   // one per trial
};

/// Monte-Carlo restricted-isometry audit on unit-norm random k-sparse vectors
/// with standard-normal nonzeros on uniformly random supports.
RipReport rip_audit(const SensingMatrix& phi, std::size_t sparsity, std::size_t trials,
                    std::uint64_t rng_seed);

}  // namespace csbss
