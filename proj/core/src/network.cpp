#include "csbss/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "csbss/errors.hpp"
#include "csbss/rng.hpp"

namespace csbss {

std::size_t count_parameters(const std::vector<LayerShape>& shapes) {
  std::size_t total = 0;
  for (const auto& s : shapes) total += s.in * s.out + s.out;
  return total;
}

template <typename Scalar>
BasicDenseNetwork<Scalar>::BasicDenseNetwork(std::vector<LayerShape> shapes,
                                             std::vector<Activation> activations)
    : shapes_(std::move(shapes)), activations_(std::move(activations)) {
  if (shapes_.empty()) throw ParameterError("DenseNetwork: at least one layer required");
  if (activations_.size() != shapes_.size()) {
    throw ParameterError("DenseNetwork: one activation per layer required");
  }
  std::size_t offset = 0;
  for (std::size_t l = 0; l < shapes_.size(); ++l) {
    if (shapes_[l].in == 0 || shapes_[l].out == 0) {
      throw ParameterError("DenseNetwork: zero-width layer " + std::to_string(l));
    }
    if (l > 0 && shapes_[l].in != shapes_[l - 1].out) {
      throw ParameterError("DenseNetwork: layer " + std::to_string(l) + " input " +
                           std::to_string(shapes_[l].in) + " does not chain from " +
                           std::to_string(shapes_[l - 1].out));
    }
    offsets_.push_back(offset);
    offset += shapes_[l].in * shapes_[l].out + shapes_[l].out;
  }
  params_ = Vector::Zero(static_cast<Eigen::Index>(offset));
}

template <typename Scalar>
void BasicDenseNetwork<Scalar>::init_he(std::uint64_t seed) {
  Rng rng(seed);
  params_.setZero();
  for (std::size_t l = 0; l < shapes_.size(); ++l) {
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(shapes_[l].in)));
    const std::size_t n = shapes_[l].in * shapes_[l].out;
    for (std::size_t i = 0; i < n; ++i) {
      params_(static_cast<Eigen::Index>(offsets_[l] + i)) = static_cast<Scalar>(normal(rng));
    }
  }
}

template <typename Scalar>
Eigen::Map<const typename BasicDenseNetwork<Scalar>::Matrix> BasicDenseNetwork<Scalar>::weight(
    std::size_t layer) const {
  return {params_.data() + offsets_[layer], static_cast<Eigen::Index>(shapes_[layer].out),
          static_cast<Eigen::Index>(shapes_[layer].in)};
}

template <typename Scalar>
Eigen::Map<const typename BasicDenseNetwork<Scalar>::Vector> BasicDenseNetwork<Scalar>::bias(
    std::size_t layer) const {
  return {params_.data() + offsets_[layer] + shapes_[layer].in * shapes_[layer].out,
          static_cast<Eigen::Index>(shapes_[layer].out)};
}

template <typename Scalar>
void BasicDenseNetwork<Scalar>::check_input(const Matrix& x) const {
  if (static_cast<std::size_t>(x.rows()) != input_dim()) {
    throw DimensionError("DenseNetwork: expected input rows " + std::to_string(input_dim()) +
                         ", got " + std::to_string(x.rows()));
  }
}

template <typename Scalar>
typename BasicDenseNetwork<Scalar>::Matrix BasicDenseNetwork<Scalar>::forward(const Matrix& x) const {
  check_input(x);
  Matrix h = x;
  for (std::size_t l = 0; l < shapes_.size(); ++l) {
    Matrix z = weight(l) * h;
    z.colwise() += bias(l);
    if (activations_[l] == Activation::relu) z = z.cwiseMax(Scalar(0));
    h = std::move(z);
  }
  return h;
}

template <typename Scalar>
typename BasicDenseNetwork<Scalar>::Matrix BasicDenseNetwork<Scalar>::forward(const Matrix& x,
                                                                              Tape& tape) const {
  check_input(x);
  tape.inputs.resize(shapes_.size());
  tape.pre.resize(shapes_.size());
  Matrix h = x;
  for (std::size_t l = 0; l < shapes_.size(); ++l) {
    tape.inputs[l] = std::move(h);
    tape.pre[l].noalias() = weight(l) * tape.inputs[l];
    tape.pre[l].colwise() += bias(l);
    h = activations_[l] == Activation::relu ? Matrix(tape.pre[l].cwiseMax(Scalar(0))) : tape.pre[l];
  }
  return h;
}

template <typename Scalar>
typename BasicDenseNetwork<Scalar>::Matrix BasicDenseNetwork<Scalar>::backward(
    const Tape& tape, const Matrix& grad_output, Vector& grad) const {
  if (grad.size() != params_.size()) {
    throw DimensionError("DenseNetwork::backward: gradient buffer has wrong length");
  }
  Matrix g = grad_output;
  for (std::size_t l = shapes_.size(); l-- > 0;) {
    if (activations_[l] == Activation::relu) {
      g = (tape.pre[l].array() > Scalar(0)).select(g, Scalar(0));
    }
    const auto out = static_cast<Eigen::Index>(shapes_[l].out);
    const auto in = static_cast<Eigen::Index>(shapes_[l].in);
    Eigen::Map<Matrix> dw(grad.data() + offsets_[l], out, in);
    Eigen::Map<Vector> db(grad.data() + offsets_[l] + shapes_[l].in * shapes_[l].out, out);
    dw.noalias() += g * tape.inputs[l].transpose();
    db += g.rowwise().sum();
    if (l > 0) {
      g = weight(l).transpose() * g;
    } else {
      return weight(l).transpose() * g;
    }
  }
  return g;
}

template class BasicDenseNetwork<float>;
template class BasicDenseNetwork<double>;

Standardizer Standardizer::fit(const Eigen::MatrixXf& columns) {
  Standardizer s;
  const auto n = static_cast<double>(columns.cols());
  if (columns.cols() == 0) throw ParameterError("Standardizer::fit: no samples");
  const Eigen::VectorXd mean = columns.cast<double>().rowwise().sum() / n;
  const Eigen::VectorXd var =
      (columns.cast<double>().colwise() - mean).array().square().rowwise().sum() / n;
  s.mean = mean.cast<float>();
  // Near-constant features (image borders) are not amplified past a tenth of
  // the typical spread.
  const double floor = std::max(0.1 * std::sqrt(var.mean()), 1e-6);
  s.inv_std = var.array().sqrt().max(floor).inverse().cast<float>();
  return s;
}

Eigen::MatrixXf Standardizer::apply(const Eigen::MatrixXf& columns) const {
  if (empty()) return columns;
  if (columns.rows() != mean.size()) throw DimensionError("Standardizer: feature count mismatch");
  return (columns.colwise() - mean).array().colwise() * inv_std.array();
}

}  // namespace csbss
