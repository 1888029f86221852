#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "csbss/errors.hpp"
#include "csbss/rng.hpp"
#include "csbss/sensing.hpp"

namespace csbss {

/// A D-dimensional vector together with its (sorted) support.
class SparseVector {
 public:
  /// Throws ParameterError if the support is unsorted, out of range, or does
  /// not match the nonzero pattern of `values`.
  SparseVector(Eigen::VectorXd values, std::vector<std::size_t> support);

  static SparseVector from_dense(const Eigen::VectorXd& values);

  /// Standard-normal nonzeros on a uniformly random support of size k.
  static SparseVector random(std::size_t dim, std::size_t sparsity, Rng& rng);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  const std::vector<std::size_t>& support() const noexcept { return support_; }
  std::size_t sparsity() const noexcept { return support_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.size()); }

 private:
  Eigen::VectorXd values_;
  std::vector<std::size_t> support_;
};

struct RecoveryStep {
  std::size_t iteration = 0;
  std::size_t chosen_index = 0;
  double residual_norm = 0.0;
};

struct RecoveryResult {
  Eigen::VectorXd estimate;
  double residual_norm = 0.0;   // ||y - Phi * estimate||
  std::size_t iterations = 0;
  std::vector<std::size_t> support_found;  // in selection order
  std::vector<RecoveryStep> trace;
};

/// Raised when the selected columns become numerically rank-deficient.
class RecoveryError : public Error {
 public:
  RecoveryError(const std::string& what, RecoveryResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const RecoveryResult& partial() const noexcept { return partial_; }

 private:
  RecoveryResult partial_;
};

/// Orthogonal matching pursuit.
///
/// Each iteration picks the column with the largest |correlation| against the
/// residual (lowest index on ties), appends it to an incrementally updated QR
/// factorization, and re-solves least squares on the active support. Stops
/// when the residual norm drops to `tol` (default 1e-9 * ||y||) or the support
/// reaches `k_max`.
RecoveryResult omp_reconstruct(const SensingMatrix& phi, const Eigen::VectorXd& y,
                               std::size_t k_max, std::optional<double> tol = std::nullopt);

/// CSV dump of the per-iteration trace: iteration,chosen_index,residual_norm
void write_trace_csv(std::ostream& out, const RecoveryResult& result);

/// A reconstruction operator R: R^d -> R^D.
using Reconstructor = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// A separation operator on the ambient domain returning k ordered components.
using SeparationOracle = std::function<std::vector<Eigen::VectorXd>(const Eigen::VectorXd&)>;

/// Wraps omp_reconstruct as a Reconstructor bound to `phi`.
Reconstructor omp_reconstructor(const SensingMatrix& phi, std::size_t k_max,
                                std::optional<double> tol = std::nullopt);

/// Brute-force baseline: reconstruct, separate in the ambient domain, then
/// recompress every component. Throws SeparationDomainError when the oracle
/// does not recognize the reconstruction and DimensionError when it returns the
/// wrong number of components.
std::vector<Eigen::VectorXd> reconstruct_then_separate(const SensingMatrix& phi,
                                                       const Eigen::VectorXd& y_mixed,
                                                       const SeparationOracle& oracle,
                                                       std::size_t k_components,
                                                       const Reconstructor& reconstruct);

}  // namespace csbss
