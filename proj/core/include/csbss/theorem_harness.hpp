#pragma once

// Constructive checks of oracle composition in the compressed domain.
//
// A separation oracle O maps a mixture x1 (+) ... (+) xk to the stacked
// components (x1, ..., xk). Given a reconstruction operator R and the
// measurement operator Phi, the compressed-domain operator
//
//     O_hat(y) = diag(Phi, ..., Phi) * O(R(y))
//
// is an oracle on the compressed mixture family whenever R is perfect on it.
// If instead ||x - R Phi x|| < eps on the source signals, the stacked error of
// diag(R, ..., R) O_hat Phi x_mix is below sqrt(k) * eps in the Euclidean norm.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "csbss/mixing.hpp"
#include "csbss/sensing.hpp"
#include "csbss/sparse_recovery.hpp"

namespace csbss {

/// Quantizes a vector to a 1e-9 grid (by default) for exact-key lookup.
std::vector<std::int64_t> fingerprint(const Eigen::VectorXd& v, double grid = 1e-9);

/// Finite table keyed by vector fingerprints, with a max-abs tolerance scan as
/// fallback for queries that land on the other side of a rounding boundary.
class FingerprintIndex {
 public:
  explicit FingerprintIndex(double match_tolerance = 1e-9, double grid = 1e-9)
      : tolerance_(match_tolerance), grid_(grid) {}

  /// Returns false when an equal fingerprint is already stored.
  bool insert(const Eigen::VectorXd& key, std::size_t id);

  /// Id of the stored key matching `query`, or nullopt.
  std::optional<std::size_t> find(const Eigen::VectorXd& query) const;

  std::size_t size() const noexcept { return keys_.size(); }
  double match_tolerance() const noexcept { return tolerance_; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept;
  };

  double tolerance_;
  double grid_;
  std::vector<Eigen::VectorXd> keys_;
  std::vector<std::size_t> ids_;
  std::unordered_map<std::vector<std::int64_t>, std::size_t, KeyHash> slots_;
};

/// Exact lookup separation oracle over a finite ambient mixture family.
/// Outputs are ordered by ascending source index.
class LookupOracle {
 public:
  /// Throws ParameterError on an empty family, mixed k, components that do not
  /// fold to the stored mixture, or a fingerprint collision between two
  /// different mixtures.
  explicit LookupOracle(const std::vector<MixedSample>& ambient_family,
                        double match_tolerance = 1e-9);

  /// Throws SeparationDomainError when `mixture` is not in the domain.
  std::vector<Eigen::VectorXd> operator()(const Eigen::VectorXd& mixture) const;

  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return entries_.size(); }
  double match_tolerance() const noexcept { return index_.match_tolerance(); }

 private:
  struct Entry {
    std::vector<std::size_t> source_indices;
    std::vector<Eigen::VectorXd> components;
  };

  std::size_t k_ = 0;
  std::vector<Entry> entries_;
  FingerprintIndex index_;
};

/// A reconstruction operator that is perfect on a finite set of ambient
/// vectors: it maps Phi x back to x by table lookup.
class LookupReconstruction {
 public:
  LookupReconstruction(const SensingMatrix& phi, const std::vector<Eigen::VectorXd>& ambient,
                       double match_tolerance = 1e-9);

  /// Throws SeparationDomainError for measurements outside the table.
  Eigen::VectorXd operator()(const Eigen::VectorXd& y) const;

  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<Eigen::VectorXd> values_;
  FingerprintIndex index_;
};

/// Ambient vectors of a family: every mixture, plus every source signal.
std::vector<Eigen::VectorXd> family_domain(const SignalSet& set,
                                           const std::vector<MixedSample>& ambient_family);

/// A reconstruction operator with bounded error on the source signals.
///
/// On the measurements of a source signal x it returns x + e_x with
/// ||e_x|| < epsilon; on the measurements of a family mixture it is exact, so
/// that the compressed oracle sees a mixture from its domain.
class PerturbedReconstruction {
 public:
  enum class Mode {
    random,   // independent uniform direction, norm epsilon * U[0, 1)
    aligned,  // one shared direction, norm epsilon * (1 - 1e-9)
  };

  /// Asserts ||x - R Phi x|| <= epsilon for every source signal and throws
  /// TheoremViolation otherwise.
  PerturbedReconstruction(const SensingMatrix& phi, const SignalSet& base,
                          const std::vector<MixedSample>& ambient_family, double epsilon,
                          std::uint64_t seed, Mode mode = Mode::random);

  Eigen::VectorXd operator()(const Eigen::VectorXd& y) const;

  double epsilon() const noexcept { return epsilon_; }
  /// Largest ||x - R Phi x|| over the source signals.
  double max_signal_error() const noexcept { return max_signal_error_; }

 private:
  double epsilon_;
  double max_signal_error_ = 0.0;
  std::vector<Eigen::VectorXd> signal_outputs_;
  std::vector<Eigen::VectorXd> mixture_outputs_;
  FingerprintIndex signal_index_;
  FingerprintIndex mixture_index_;
};

/// Applies diag(block, ..., block) (k copies) to a stacked vector.
Eigen::VectorXd block_diagonal_apply(const Eigen::MatrixXd& block, const Eigen::VectorXd& stacked,
                                     std::size_t k);

/// Same, for a generic per-block map such as a reconstruction operator.
Eigen::VectorXd block_diagonal_apply(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& block_map,
    const Eigen::VectorXd& stacked, std::size_t k);

std::vector<Eigen::VectorXd> split_blocks(const Eigen::VectorXd& stacked, std::size_t k);
Eigen::VectorXd stack_blocks(const std::vector<Eigen::VectorXd>& blocks);

/// y -> diag(Phi, ..., Phi) O(R(y)), the compressed-domain separation operator.
class CompressedOracle {
 public:
  CompressedOracle(SensingMatrix phi, SeparationOracle oracle, Reconstructor reconstruct,
                   std::size_t k);

  /// Stacked k*d output. Throws SeparationDomainError when R(y) misses the
  /// oracle's domain.
  Eigen::VectorXd operator()(const Eigen::VectorXd& y) const;
  std::vector<Eigen::VectorXd> blocks(const Eigen::VectorXd& y) const;

  std::size_t k() const noexcept { return k_; }
  const SensingMatrix& phi() const noexcept { return phi_; }

 private:
  SensingMatrix phi_;
  SeparationOracle oracle_;
  Reconstructor reconstruct_;
  std::size_t k_;
};

CompressedOracle compose_compressed_oracle(const SensingMatrix& phi, const LookupOracle& oracle,
                                           Reconstructor reconstruct);

/// The converse direction: x_mix -> diag(R, ..., R) O_hat(Phi x_mix), an
/// ambient-domain separation operator built from a compressed one.
SeparationOracle ambient_oracle_from_compressed(const CompressedOracle& compressed,
                                                Reconstructor reconstruct);

struct Theorem1Report {
  std::size_t mixtures = 0;
  double max_abs_error = 0.0;
  std::vector<std::size_t> failures;  // family positions exceeding the tolerance
  bool ok() const noexcept { return failures.empty(); }
};

/// Runs O_hat on Phi x_mix for every family member and compares with the
/// stacked (Phi x_i1, ..., Phi x_ik) in ascending source order.
Theorem1Report verify_theorem1(const CompressedOracle& compressed,
                               const std::vector<MixedSample>& ambient_family,
                               double tolerance = 1e-9);

struct BoundRow {
  std::size_t mixture_id = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct BoundReport {
  std::size_t k = 0;
  double epsilon = 0.0;
  double max_ratio = 0.0;
  std::vector<BoundRow> rows;
  std::vector<std::size_t> violations;  // mixture ids with lhs > sqrt(k) * epsilon
  bool ok() const noexcept { return violations.empty(); }
};

/// Evaluates ||diag(R,...,R) O_hat Phi x_mix - x|| against sqrt(k) * epsilon
/// for every mixture, where O_hat = diag(Phi,...,Phi) O R.
BoundReport verify_theorem2(const SensingMatrix& phi, const LookupOracle& oracle,
                            const PerturbedReconstruction& reconstruct,
                            const std::vector<MixedSample>& ambient_mixtures);

/// mixture_id,lhs,rhs,ratio
void write_bound_csv(std::ostream& out, const BoundReport& report);

/// N random k-sparse signals of length D; labels are the signal indices.
SignalSet make_sparse_signal_set(std::size_t count, std::size_t dim, std::size_t sparsity,
                                 std::uint64_t seed);

}  // namespace csbss
