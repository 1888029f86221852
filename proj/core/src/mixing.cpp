#include "csbss/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include "csbss/binary_io.hpp"
#include "csbss/errors.hpp"
#include "csbss/rng.hpp"

namespace csbss {

namespace {

constexpr std::string_view kMagic = "CSMX";
constexpr double kCommutationTolerance = 1e-12;

void check_commutes(const Eigen::VectorXd& mix_then_compress,
                    const Eigen::VectorXd& compress_then_mix, std::size_t sample) {
  const double scale = std::max(1.0, mix_then_compress.norm());
  const double gap = (mix_then_compress - compress_then_mix).norm();
  if (gap > kCommutationTolerance * scale) {
    throw DimensionError("sample " + std::to_string(sample) +
                         ": mixing does not commute with compression (gap " +
                         std::to_string(gap) + ")");
  }
}

MixedSample make_sample(const SignalSet& set, const std::vector<std::size_t>& draw,
                        const SensingMatrix* phi, std::size_t sample_id) {
  MixedSample sample;
  sample.component_indices = draw;
  std::vector<Eigen::VectorXd> ambient;
  ambient.reserve(draw.size());
  for (auto i : draw) {
    ambient.push_back(set.signals[i]);
    sample.component_labels.push_back(set.labels[i]);
  }
  if (phi == nullptr) {
    sample.components = ambient;
    sample.mixture = mix_all(ambient);
    return sample;
  }
  for (const auto& x : ambient) sample.components.push_back(phi->compress(x));
  sample.mixture = mix_all(sample.components);
  check_commutes(phi->compress(mix_all(ambient)), sample.mixture, sample_id);
  return sample;
}

}  // namespace

Eigen::VectorXd mix(const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) {
    throw DimensionError("mix: length mismatch " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  return a + b;
}

Eigen::VectorXd mix_all(const std::vector<Eigen::VectorXd>& parts) {
  if (parts.empty()) throw ParameterError("mix_all: nothing to mix");
  Eigen::VectorXd acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = mix(acc, parts[i]);
  return acc;
}

void SignalSet::validate() const {
  if (signals.empty()) throw ParameterError("SignalSet: at least one signal required");
  if (labels.size() != signals.size()) {
    throw ParameterError("SignalSet: labels/signals count mismatch");
  }
  for (const auto& s : signals) {
    if (static_cast<std::size_t>(s.size()) != dim()) {
      throw ParameterError("SignalSet: all signals must share one length");
    }
  }
}

std::vector<std::vector<std::size_t>> draw_mixture_indices(std::size_t n, std::size_t k,
                                                           std::size_t count,
                                                           std::uint64_t rng_seed) {
  if (count == 0) throw ParameterError("mixture count must be positive");
  if (k == 0 || k > n) {
    throw ParameterError("cannot draw " + std::to_string(k) + " distinct signals from " +
                         std::to_string(n));
  }
  Rng rng(rng_seed);
  std::vector<std::vector<std::size_t>> draws;
  draws.reserve(count);
  std::vector<std::size_t> picked;
  for (std::size_t s = 0; s < count; ++s) {
    picked.clear();
    // Rejection keeps each draw uniform over k-subsets in draw order; k << n here.
    while (picked.size() < k) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      const auto i = pick(rng);
      if (std::find(picked.begin(), picked.end(), i) == picked.end()) picked.push_back(i);
    }
    draws.push_back(picked);
  }
  return draws;
}

std::vector<MixedSample> build_mixture_family(const SignalSet& set, std::size_t k,
                                              std::size_t count, std::uint64_t rng_seed,
                                              const SensingMatrix* phi) {
  set.validate();
  if (phi != nullptr && phi->cols() != set.dim()) {
    throw DimensionError("build_mixture_family: Phi columns do not match signal length");
  }
  const auto draws = draw_mixture_indices(set.size(), k, count, rng_seed);
  std::vector<MixedSample> family;
  family.reserve(count);
  for (std::size_t s = 0; s < draws.size(); ++s) family.push_back(make_sample(set, draws[s], phi, s));
  return family;
}

std::vector<MixedSample> enumerate_mixture_family(const SignalSet& set, std::size_t k,
                                                  const SensingMatrix* phi) {
  set.validate();
  if (k == 0 || k > set.size()) throw ParameterError("enumerate_mixture_family: need 1 <= k <= N");
  std::vector<MixedSample> family;
  std::vector<std::size_t> combo(k);
  std::iota(combo.begin(), combo.end(), std::size_t{0});
  const std::size_t n = set.size();
  while (true) {
    family.push_back(make_sample(set, combo, phi, family.size()));
    // Advance to the next k-combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && combo[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
  return family;
}

void MixtureDataset::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open " + path.string() + " for writing");
  io::write_magic(out, kMagic);
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(k()));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
  io::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(size()));
  for (std::size_t s = 0; s < size(); ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    for (auto i : indices[s]) io::write_le<std::uint32_t>(out, i);
    for (auto l : labels[s]) io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(l));
    for (Eigen::Index r = 0; r < mixtures.rows(); ++r) io::write_le<float>(out, mixtures(r, col));
    for (const auto& comp : components) {
      for (Eigen::Index r = 0; r < comp.rows(); ++r) io::write_le<float>(out, comp(r, col));
    }
  }
  if (!out) throw ParameterError("write failed for " + path.string());
}

MixtureDataset MixtureDataset::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  io::expect_magic(in, kMagic);
  const auto k = io::read_le<std::uint32_t>(in, "k");
  const auto dim = io::read_le<std::uint32_t>(in, "dim");
  const auto count = io::read_le<std::uint64_t>(in, "count");
  if (k == 0 || dim == 0) throw ParseError("CSMX header has zero k or dim");
  MixtureDataset ds;
  ds.dim = dim;
  const auto n = static_cast<Eigen::Index>(count);
  ds.mixtures.resize(dim, n);
  ds.components.assign(k, Eigen::MatrixXf(dim, n));
  ds.labels.assign(count, std::vector<int>(k));
  ds.indices.assign(count, std::vector<std::uint32_t>(k));
  for (std::uint64_t s = 0; s < count; ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    for (auto& i : ds.indices[s]) i = io::read_le<std::uint32_t>(in, "index");
    for (auto& l : ds.labels[s]) l = static_cast<int>(io::read_le<std::uint32_t>(in, "label"));
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(dim); ++r) {
      ds.mixtures(r, col) = io::read_le<float>(in, "mixture");
    }
    for (auto& comp : ds.components) {
      for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(dim); ++r) {
        comp(r, col) = io::read_le<float>(in, "component");
      }
    }
  }
  return ds;
}

MixtureDataset build_mixture_dataset(const Eigen::MatrixXf& images, const std::vector<int>& labels,
                                     std::size_t k, std::size_t count, std::uint64_t rng_seed,
                                     const SensingMatrix* phi) {
  const auto n = static_cast<std::size_t>(images.cols());
  if (labels.size() != n) throw ParameterError("build_mixture_dataset: label count mismatch");
  if (phi != nullptr && phi->cols() != static_cast<std::size_t>(images.rows())) {
    throw DimensionError("build_mixture_dataset: Phi columns do not match image size");
  }
  const auto draws = draw_mixture_indices(n, k, count, rng_seed);
  const std::size_t dim = phi ? phi->rows() : static_cast<std::size_t>(images.rows());
  const auto cols = static_cast<Eigen::Index>(count);

  MixtureDataset ds;
  ds.dim = dim;
  ds.mixtures.resize(static_cast<Eigen::Index>(dim), cols);
  ds.components.assign(k, Eigen::MatrixXf(static_cast<Eigen::Index>(dim), cols));
  ds.labels.resize(count);
  ds.indices.resize(count);

  // Work in double in blocks of samples so the commutation check is meaningful.
  constexpr std::size_t kBlock = 512;
  const auto D = images.rows();
  for (std::size_t start = 0; start < count; start += kBlock) {
    const std::size_t stop = std::min(count, start + kBlock);
    const auto width = static_cast<Eigen::Index>(stop - start);
    std::vector<Eigen::MatrixXd> parts(k, Eigen::MatrixXd(D, width));
    for (std::size_t s = start; s < stop; ++s) {
      const auto col = static_cast<Eigen::Index>(s - start);
      for (std::size_t c = 0; c < k; ++c) {
        const auto src = draws[s][c];
        parts[c].col(col) = images.col(static_cast<Eigen::Index>(src)).cast<double>();
        ds.labels[s].push_back(labels[src]);
        ds.indices[s].push_back(static_cast<std::uint32_t>(src));
      }
    }
    Eigen::MatrixXd ambient_mix = parts[0];
    for (std::size_t c = 1; c < k; ++c) ambient_mix += parts[c];

    Eigen::MatrixXd mixed;
    std::vector<Eigen::MatrixXd> targets(k);
    if (phi != nullptr) {
      mixed = phi->compress_columns(ambient_mix);
      Eigen::MatrixXd recombined;
      for (std::size_t c = 0; c < k; ++c) {
        targets[c] = phi->compress_columns(parts[c]);
        recombined = c == 0 ? targets[c] : Eigen::MatrixXd(recombined + targets[c]);
      }
      for (Eigen::Index j = 0; j < width; ++j) {
        check_commutes(mixed.col(j), recombined.col(j), start + static_cast<std::size_t>(j));
      }
    } else {
      mixed = std::move(ambient_mix);
      targets = std::move(parts);
    }
    ds.mixtures.middleCols(static_cast<Eigen::Index>(start), width) = mixed.cast<float>();
    for (std::size_t c = 0; c < k; ++c) {
      ds.components[c].middleCols(static_cast<Eigen::Index>(start), width) = targets[c].cast<float>();
    }
  }
  return ds;
}

}  // namespace csbss
