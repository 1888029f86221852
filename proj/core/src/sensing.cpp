#include "csbss/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "csbss/binary_io.hpp"
#include "csbss/errors.hpp"
#include "csbss/rng.hpp"

namespace csbss {

namespace {

constexpr std::string_view kMagic = "CSPM";
constexpr std::uint16_t kVersion = 1;

void check_rate(double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw ParameterError("sensing rate must lie in (0, 1], got " + std::to_string(rate));
  }
}

}  // namespace

std::size_t measurement_count(std::size_t ambient_dim, double sensing_rate) {
  check_rate(sensing_rate);
  // Relative slack absorbs representation error such as 0.29 * 100 = 28.999...
  const double exact = sensing_rate * static_cast<double>(ambient_dim);
  return static_cast<std::size_t>(std::floor(exact * (1.0 + 1e-12)));
}

SensingMatrix SensingMatrix::generate(std::uint64_t seed, std::size_t ambient_dim,
                                      double sensing_rate) {
  if (ambient_dim == 0) throw ParameterError("ambient dimension must be positive");
  const std::size_t d = measurement_count(ambient_dim, sensing_rate);
  if (d == 0) {
    throw ParameterError("sensing rate " + std::to_string(sensing_rate) +
                         " leaves no measurements for D=" + std::to_string(ambient_dim));
  }
  const double magnitude = 1.0 / std::sqrt(static_cast<double>(d));
  Eigen::MatrixXd entries(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(ambient_dim));
  std::uint64_t word = 0;
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < ambient_dim; ++c) {
      const std::uint64_t counter = r * ambient_dim + c;
      if (counter % 64 == 0) word = counter_bits(seed, counter / 64);
      const bool positive = (word >> (counter % 64)) & 1ULL;
      entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          positive ? magnitude : -magnitude;
    }
  }
  return SensingMatrix(std::move(entries), seed, sensing_rate);
}

Eigen::VectorXd SensingMatrix::compress(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != cols()) {
    throw DimensionError("compress: expected length " + std::to_string(cols()) + ", got " +
                         std::to_string(x.size()));
  }
  return entries_ * x;
}

Eigen::MatrixXd SensingMatrix::compress_columns(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  if (static_cast<std::size_t>(x.rows()) != cols()) {
    throw DimensionError("compress_columns: expected " + std::to_string(cols()) + " rows, got " +
                         std::to_string(x.rows()));
  }
  return entries_ * x;
}

void SensingMatrix::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open " + path.string() + " for writing");
  io::write_magic(out, kMagic);
  io::write_le<std::uint16_t>(out, kVersion);
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(rows()));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(cols()));
  io::write_le<std::uint64_t>(out, seed_);
  io::write_le<double>(out, sensing_rate_);
  for (Eigen::Index r = 0; r < entries_.rows(); ++r) {
    for (Eigen::Index c = 0; c < entries_.cols(); ++c) {
      io::write_le<float>(out, static_cast<float>(entries_(r, c)));
    }
  }
  if (!out) throw ParameterError("write failed for " + path.string());
}

SensingMatrix SensingMatrix::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  io::expect_magic(in, kMagic);
  const auto version = io::read_le<std::uint16_t>(in, "version");
  if (version != kVersion) {
    throw ParseError("unsupported CSPM version " + std::to_string(version));
  }
  const auto d = io::read_le<std::uint32_t>(in, "d");
  const auto D = io::read_le<std::uint32_t>(in, "D");
  const auto seed = io::read_le<std::uint64_t>(in, "seed");
  const auto rate = io::read_le<double>(in, "rate");
  if (D == 0 || d == 0 || !(rate > 0.0 && rate <= 1.0) || measurement_count(D, rate) != d) {
    throw ParseError("CSPM header dimensions inconsistent: d=" + std::to_string(d) +
                     " D=" + std::to_string(D) + " rate=" + std::to_string(rate));
  }
  // Entries are stored as f32; the exact +-1/sqrt(d) value is restored from the sign.
  const double magnitude = 1.0 / std::sqrt(static_cast<double>(d));
  Eigen::MatrixXd entries(d, D);
  for (std::uint32_t r = 0; r < d; ++r) {
    for (std::uint32_t c = 0; c < D; ++c) {
      const float v = io::read_le<float>(in, "entry");
      if (std::abs(std::abs(static_cast<double>(v)) - magnitude) > 1e-6 * magnitude) {
        throw ParseError("CSPM entry (" + std::to_string(r) + "," + std::to_string(c) +
                         ") is not +-1/sqrt(d)");
      }
      entries(r, c) = v > 0.0f ? magnitude : -magnitude;
    }
  }
  return SensingMatrix(std::move(entries), seed, rate);
}

Eigen::VectorXd compress(const SensingMatrix& phi, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return phi.compress(x);
}

RipReport rip_audit(const SensingMatrix& phi, std::size_t sparsity, std::size_t trials,
                    std::uint64_t rng_seed) {
  if (sparsity == 0 || sparsity > phi.rows()) {
    throw ParameterError("rip_audit: sparsity must be in [1, d=" + std::to_string(phi.rows()) +
                         "], got " + std::to_string(sparsity));
  }
  if (trials == 0) throw ParameterError("rip_audit: trials must be positive");

  Rng rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::size_t> columns(phi.cols());
  RipReport report;
  report.distortions.reserve(trials);
  const auto& m = phi.matrix();
  for (std::size_t t = 0; t < trials; ++t) {
    std::iota(columns.begin(), columns.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `sparsity` slots form a uniform support.
    for (std::size_t i = 0; i < sparsity; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, columns.size() - 1);
      std::swap(columns[i], columns[pick(rng)]);
    }
    Eigen::VectorXd values(static_cast<Eigen::Index>(sparsity));
    for (auto& v : values) v = normal(rng);
    values /= values.norm();
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m.rows());
    for (std::size_t i = 0; i < sparsity; ++i) {
      y += values(static_cast<Eigen::Index>(i)) * m.col(static_cast<Eigen::Index>(columns[i]));
    }
    const double distortion = std::abs(y.squaredNorm() - 1.0);
    report.distortions.push_back(distortion);
    report.max_distortion = std::max(report.max_distortion, distortion);
  }
  return report;
}

}  // namespace csbss
