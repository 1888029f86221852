#include "csbss/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace csbss {

SparseVector::SparseVector(Eigen::VectorXd values, std::vector<std::size_t> support)
    : values_(std::move(values)), support_(std::move(support)) {
  if (!std::is_sorted(support_.begin(), support_.end()) ||
      std::adjacent_find(support_.begin(), support_.end()) != support_.end()) {
    throw ParameterError("SparseVector: support must be strictly increasing");
  }
  if (support_.size() > dim()) throw ParameterError("SparseVector: k exceeds D");
  std::size_t next = 0;
  for (std::size_t i = 0; i < dim(); ++i) {
    const bool on = next < support_.size() && support_[next] == i;
    if (on) ++next;
    if (on == (values_(static_cast<Eigen::Index>(i)) == 0.0)) {
      throw ParameterError("SparseVector: values must be nonzero exactly on the support (index " +
                           std::to_string(i) + ")");
    }
  }
  if (next != support_.size()) throw ParameterError("SparseVector: support index out of range");
}

SparseVector SparseVector::from_dense(const Eigen::VectorXd& values) {
  std::vector<std::size_t> support;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) != 0.0) support.push_back(static_cast<std::size_t>(i));
  }
  return SparseVector(values, std::move(support));
}

SparseVector SparseVector::random(std::size_t dim, std::size_t sparsity, Rng& rng) {
  if (sparsity > dim) throw ParameterError("SparseVector::random: k exceeds D");
  std::vector<std::size_t> indices(dim);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  for (std::size_t i = 0; i < sparsity; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, dim - 1);
    std::swap(indices[i], indices[pick(rng)]);
  }
  indices.resize(sparsity);
  std::sort(indices.begin(), indices.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (auto i : indices) {
    double v = 0.0;
    while (v == 0.0) v = normal(rng);
    values(static_cast<Eigen::Index>(i)) = v;
  }
  return SparseVector(std::move(values), std::move(indices));
}

RecoveryResult omp_reconstruct(const SensingMatrix& phi, const Eigen::VectorXd& y,
                               std::size_t k_max, std::optional<double> tol) {
  const auto d = static_cast<Eigen::Index>(phi.rows());
  const auto D = static_cast<Eigen::Index>(phi.cols());
  if (y.size() != d) {
    throw DimensionError("omp_reconstruct: expected measurement length " + std::to_string(d) +
                         ", got " + std::to_string(y.size()));
  }
  if (k_max == 0 || k_max > phi.rows()) {
    throw ParameterError("omp_reconstruct: k_max must be in [1, d]");
  }
  const double stop = tol.value_or(1e-9 * y.norm());
  if (stop < 0.0) throw ParameterError("omp_reconstruct: tol must be non-negative");

  const auto& A = phi.matrix();
  RecoveryResult result;
  result.estimate = Eigen::VectorXd::Zero(D);
  Eigen::VectorXd residual = y;
  result.residual_norm = residual.norm();

  // Thin QR of the selected columns: A_S = Q R, Q has orthonormal columns.
  Eigen::MatrixXd Q(d, static_cast<Eigen::Index>(k_max));
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k_max),
                                            static_cast<Eigen::Index>(k_max));
  std::vector<char> selected(static_cast<std::size_t>(D), 0);

  auto solve_on_support = [&](Eigen::Index t) {
    const Eigen::VectorXd qty = Q.leftCols(t).transpose() * y;
    const Eigen::VectorXd coeffs =
        R.topLeftCorner(t, t).triangularView<Eigen::Upper>().solve(qty);
    result.estimate.setZero();
    for (Eigen::Index j = 0; j < t; ++j) {
      result.estimate(static_cast<Eigen::Index>(result.support_found[static_cast<std::size_t>(j)])) =
          coeffs(j);
    }
  };

  while (result.residual_norm > stop && result.support_found.size() < k_max) {
    const Eigen::VectorXd correlation = A.transpose() * residual;
    Eigen::Index best = -1;
    double best_abs = -1.0;
    for (Eigen::Index j = 0; j < D; ++j) {
      if (selected[static_cast<std::size_t>(j)]) continue;
      const double c = std::abs(correlation(j));
      if (c > best_abs) {
        best_abs = c;
        best = j;
      }
    }
    const auto t = static_cast<Eigen::Index>(result.support_found.size());
    const Eigen::VectorXd column = A.col(best);

    // Modified Gram-Schmidt with one reorthogonalization pass.
    Eigen::VectorXd q = column;
    Eigen::VectorXd r_col = Eigen::VectorXd::Zero(t + 1);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < t; ++j) {
        const double proj = Q.col(j).dot(q);
        q -= proj * Q.col(j);
        r_col(j) += proj;
      }
    }
    const double diag = q.norm();
    if (diag <= 1e-10 * column.norm()) {
      if (t > 0) solve_on_support(t);
      throw RecoveryError("omp_reconstruct: selected column " + std::to_string(best) +
                              " is numerically dependent on the active support",
                          std::move(result));
    }
    r_col(t) = diag;
    Q.col(t) = q / diag;
    R.col(t).head(t + 1) = r_col;
    selected[static_cast<std::size_t>(best)] = 1;
    result.support_found.push_back(static_cast<std::size_t>(best));

    // The new residual is y projected off span(Q[:, 0..t]).
    residual -= Q.col(t) * Q.col(t).dot(residual);
    result.residual_norm = residual.norm();
    ++result.iterations;
    result.trace.push_back({result.iterations, static_cast<std::size_t>(best), result.residual_norm});
  }
  if (!result.support_found.empty()) {
    solve_on_support(static_cast<Eigen::Index>(result.support_found.size()));
    result.residual_norm = (y - A * result.estimate).norm();
  }
  return result;
}

void write_trace_csv(std::ostream& out, const RecoveryResult& result) {
  out << "iteration,chosen_index,residual_norm\n";
  out.precision(17);
  for (const auto& step : result.trace) {
    out << step.iteration << ',' << step.chosen_index << ',' << step.residual_norm << '\n';
  }
}

Reconstructor omp_reconstructor(const SensingMatrix& phi, std::size_t k_max,
                                std::optional<double> tol) {
  return [&phi, k_max, tol](const Eigen::VectorXd& y) {
    return omp_reconstruct(phi, y, k_max, tol).estimate;
  };
}

std::vector<Eigen::VectorXd> reconstruct_then_separate(const SensingMatrix& phi,
                                                       const Eigen::VectorXd& y_mixed,
                                                       const SeparationOracle& oracle,
                                                       std::size_t k_components,
                                                       const Reconstructor& reconstruct) {
  if (k_components == 0) throw ParameterError("reconstruct_then_separate: k must be positive");
  if (static_cast<std::size_t>(y_mixed.size()) != phi.rows()) {
    throw DimensionError("reconstruct_then_separate: measurement length mismatch");
  }
  const Eigen::VectorXd ambient = reconstruct(y_mixed);
  std::vector<Eigen::VectorXd> components = oracle(ambient);
  if (components.size() != k_components) {
    throw DimensionError("reconstruct_then_separate: oracle returned " +
                         std::to_string(components.size()) + " components, expected " +
                         std::to_string(k_components));
  }
  for (auto& c : components) c = phi.compress(c);
  return components;
}

}  // namespace csbss
