#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace csbss {

enum class Activation : std::uint8_t { identity = 0, relu = 1 };

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// Sum of in*out + out over the layers.
std::size_t count_parameters(const std::vector<LayerShape>& shapes);

/// Fully connected feed-forward network over a single flat parameter vector.
///
/// Layer l owns a weight block (out x in, column-major) followed by its bias.
/// Batches are matrices with one sample per column.
template <typename Scalar>
class BasicDenseNetwork {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// Activations recorded by a training forward pass.
  struct Tape {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation of each layer
  };

  BasicDenseNetwork() = default;

  /// Zero-initialized network. Throws ParameterError on an empty or
  /// non-chaining layer list or a missing activation.
  BasicDenseNetwork(std::vector<LayerShape> shapes, std::vector<Activation> activations);

  const std::vector<LayerShape>& shapes() const noexcept { return shapes_; }
  const std::vector<Activation>& activations() const noexcept { return activations_; }
  std::size_t layer_count() const noexcept { return shapes_.size(); }
  std::size_t input_dim() const noexcept { return shapes_.empty() ? 0 : shapes_.front().in; }
  std::size_t output_dim() const noexcept { return shapes_.empty() ? 0 : shapes_.back().out; }
  std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(params_.size()); }

  Vector& parameters() noexcept { return params_; }
  const Vector& parameters() const noexcept { return params_; }

  /// He-normal weights (std sqrt(2/in)), zero biases.
  void init_he(std::uint64_t seed);

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, Tape& tape) const;

  /// Accumulates dL/dtheta into `grad` (length parameter_count()) and returns
  /// dL/dx, given dL/doutput for the batch recorded in `tape`.
  Matrix backward(const Tape& tape, const Matrix& grad_output, Vector& grad) const;

  template <typename Other>
  BasicDenseNetwork<Other> cast() const {
    BasicDenseNetwork<Other> out(shapes_, activations_);
    out.parameters() = params_.template cast<Other>();
    return out;
  }

 private:
  Eigen::Map<const Matrix> weight(std::size_t layer) const;
  Eigen::Map<const Vector> bias(std::size_t layer) const;
  void check_input(const Matrix& x) const;

  std::vector<LayerShape> shapes_;
  std::vector<Activation> activations_;
  std::vector<std::size_t> offsets_;
  Vector params_;
};

extern template class BasicDenseNetwork<float>;
extern template class BasicDenseNetwork<double>;

using DenseNetwork = BasicDenseNetwork<float>;

/// Per-feature affine standardization fitted on training columns.
struct Standardizer {
  Eigen::VectorXf mean;
  Eigen::VectorXf inv_std;

  bool empty() const noexcept { return mean.size() == 0; }
  /// std is floored at 1e-6 so constant features map to zero.
  /// Standard deviations are floored at 0.1 x the root-mean-square spread.
  static Standardizer fit(const Eigen::MatrixXf& columns);
  Eigen::MatrixXf apply(const Eigen::MatrixXf& columns) const;
};

}  // namespace csbss
