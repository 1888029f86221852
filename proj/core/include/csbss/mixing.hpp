#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "csbss/sensing.hpp"

namespace csbss {

/// The mixing operator: element-wise addition, no clipping.
///
/// Addition is the instantiation that commutes exactly with any linear
/// measurement operator, so Phi(x + y) = Phi x + Phi y holds in the compressed
/// domain as well. Throws DimensionError on length mismatch.
Eigen::VectorXd mix(const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b);

/// Left fold of mix over a non-empty list.
Eigen::VectorXd mix_all(const std::vector<Eigen::VectorXd>& parts);

struct SignalSet {
  std::vector<Eigen::VectorXd> signals;
  std::vector<int> labels;  // one per signal

  std::size_t size() const noexcept { return signals.size(); }
  std::size_t dim() const noexcept {
    return signals.empty() ? 0 : static_cast<std::size_t>(signals.front().size());
  }
  /// Throws ParameterError when empty, ragged, or labels are missing.
  void validate() const;
};

struct MixedSample {
  Eigen::VectorXd mixture;
  std::vector<Eigen::VectorXd> components;
  std::vector<int> component_labels;
  std::vector<std::size_t> component_indices;  // into the source SignalSet

  std::size_t k() const noexcept { return components.size(); }
};

/// `count` draws of k distinct indices from [0, n), uniformly without
/// replacement within a draw. Order inside a draw is draw order.
std::vector<std::vector<std::size_t>> draw_mixture_indices(std::size_t n, std::size_t k,
                                                           std::size_t count,
                                                           std::uint64_t rng_seed);

/// Samples `count` k-fold mixtures. With `phi`, components are compressed first
/// and then mixed; every sample is checked against mix-then-compress to 1e-12
/// relative and a DimensionError is raised if they disagree.
std::vector<MixedSample> build_mixture_family(const SignalSet& set, std::size_t k,
                                              std::size_t count, std::uint64_t rng_seed,
                                              const SensingMatrix* phi = nullptr);

/// Every k-subset of the set, components in ascending source index order.
std::vector<MixedSample> enumerate_mixture_family(const SignalSet& set, std::size_t k,
                                                  const SensingMatrix* phi = nullptr);

/// Column-major batch form of a mixture family used by the learned pipeline.
/// Column j of `mixtures` and of every `components[c]` belong to sample j.
struct MixtureDataset {
  std::size_t dim = 0;
  Eigen::MatrixXf mixtures;                 // dim x count
  std::vector<Eigen::MatrixXf> components;  // k entries, each dim x count
  std::vector<std::vector<int>> labels;     // count x k
  std::vector<std::vector<std::uint32_t>> indices;  // count x k

  std::size_t size() const noexcept { return static_cast<std::size_t>(mixtures.cols()); }
  std::size_t k() const noexcept { return components.size(); }

  /// "CSMX" record stream: magic, u32 k, u32 dim, u64 count; then per sample
  /// k u32 indices, k u32 labels, the f32 mixture and k f32 components.
  void save(const std::filesystem::path& path) const;
  static MixtureDataset load(const std::filesystem::path& path);
};

/// Builds a k-fold dataset from images stored one per column (D x N). With
/// `phi` the mixtures are mix-then-compress and the targets compress-per-
/// component; the two routes are checked against each other per sample.
MixtureDataset build_mixture_dataset(const Eigen::MatrixXf& images, const std::vector<int>& labels,
                                     std::size_t k, std::size_t count, std::uint64_t rng_seed,
                                     const SensingMatrix* phi = nullptr);

}  // namespace csbss
