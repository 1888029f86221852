#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "csbss/errors.hpp"

namespace csbss {

/// Which target each output slot is matched to.
enum class Assignment : std::uint8_t { identity = 0, swap = 1 };

struct PitResult {
  double loss = 0.0;
  Assignment assignment = Assignment::identity;
};

/// Two-slot permutation-invariant loss: the smaller of the two assignments'
/// summed per-slot mean squared errors. Ties resolve to identity.
PitResult pit_loss(const Eigen::VectorXd& out1, const Eigen::VectorXd& out2,
                   const Eigen::VectorXd& target1, const Eigen::VectorXd& target2);

template <typename Scalar>
struct PitBatch {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  double loss = 0.0;                    // mean over the batch
  std::vector<Assignment> assignments;  // one per column
  Matrix grad1;                         // dLoss/dout1
  Matrix grad2;                         // dLoss/dout2
};

/// Batched PIT over columns. With `permutation_invariant == false` the
/// identity assignment is forced (fixed-order ablation).
template <typename Scalar>
PitBatch<Scalar> pit_loss_batch(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& out1,
                                const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& out2,
                                const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& target1,
                                const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& target2,
                                bool permutation_invariant = true) {
  const auto d = out1.rows();
  const auto n = out1.cols();
  if (out2.rows() != d || target1.rows() != d || target2.rows() != d || out2.cols() != n ||
      target1.cols() != n || target2.cols() != n) {
    throw DimensionError("pit_loss_batch: shape mismatch");
  }
  PitBatch<Scalar> result;
  result.assignments.resize(static_cast<std::size_t>(n));
  result.grad1.resize(d, n);
  result.grad2.resize(d, n);
  const double inv_d = 1.0 / static_cast<double>(d);
  const double scale = 2.0 * inv_d / static_cast<double>(n);
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double same = ((out1.col(j) - target1.col(j)).squaredNorm() +
                         (out2.col(j) - target2.col(j)).squaredNorm()) * inv_d;
    const double crossed = ((out1.col(j) - target2.col(j)).squaredNorm() +
                            (out2.col(j) - target1.col(j)).squaredNorm()) * inv_d;
    const bool swap = permutation_invariant && crossed < same;
    result.assignments[static_cast<std::size_t>(j)] = swap ? Assignment::swap : Assignment::identity;
    total += swap ? crossed : same;
    const auto& a = swap ? target2 : target1;
    const auto& b = swap ? target1 : target2;
    result.grad1.col(j) = (out1.col(j) - a.col(j)) * static_cast<Scalar>(scale);
    result.grad2.col(j) = (out2.col(j) - b.col(j)) * static_cast<Scalar>(scale);
  }
  result.loss = total / static_cast<double>(n);
  return result;
}

/// Mean softmax cross-entropy over columns of `logits`. When `grad` is non-null
/// it receives dLoss/dlogits.
template <typename Scalar>
double softmax_cross_entropy(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& logits,
                             const std::vector<int>& labels,
                             Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>* grad = nullptr) {
  const auto classes = logits.rows();
  const auto n = logits.cols();
  if (static_cast<std::size_t>(n) != labels.size()) {
    throw DimensionError("softmax_cross_entropy: label count mismatch");
  }
  if (grad != nullptr) grad->resize(classes, n);
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int label = labels[static_cast<std::size_t>(j)];
    if (label < 0 || label >= classes) throw ParameterError("softmax_cross_entropy: label out of range");
    const Eigen::VectorXd z = logits.col(j).template cast<double>();
    const double zmax = z.maxCoeff();
    const Eigen::VectorXd e = (z.array() - zmax).exp();
    const double sum = e.sum();
    total += std::log(sum) + zmax - z(label);
    if (grad != nullptr) {
      Eigen::VectorXd p = e / sum;
      p(label) -= 1.0;
      grad->col(j) = (p / static_cast<double>(n)).template cast<Scalar>();
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace csbss
