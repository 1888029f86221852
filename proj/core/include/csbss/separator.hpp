#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "csbss/budget.hpp"
#include "csbss/losses.hpp"
#include "csbss/network.hpp"

namespace csbss {

/// One encoder and two decoders. The encoder emits 2*latent values; the first
/// half feeds decoder 1 and the second half decoder 2, each of which maps
/// back to the measurement dimension.
template <typename Scalar>
class BasicSeparatorModel {
 public:
  using Network = BasicDenseNetwork<Scalar>;
  using Matrix = typename Network::Matrix;
  using Vector = typename Network::Vector;

  struct Gradients {
    Vector encoder;
    Vector decoder1;
    Vector decoder2;
  };

  BasicSeparatorModel() = default;

  /// Throws DimensionError unless encoder: d -> 2L and both decoders: L -> d.
  BasicSeparatorModel(Network encoder, Network decoder1, Network decoder2);

  std::size_t input_dim() const noexcept { return encoder_.input_dim(); }
  std::size_t latent_dim() const noexcept { return encoder_.output_dim() / 2; }
  std::size_t parameter_count() const noexcept {
    return encoder_.parameter_count() + decoder1_.parameter_count() + decoder2_.parameter_count();
  }

  Network& encoder() noexcept { return encoder_; }
  const Network& encoder() const noexcept { return encoder_; }
  Network& decoder(int which) noexcept { return which == 0 ? decoder1_ : decoder2_; }
  const Network& decoder(int which) const noexcept { return which == 0 ? decoder1_ : decoder2_; }

  /// Input standardization applied by forward(); empty means identity.
  Standardizer& standardizer() noexcept { return standardizer_; }
  const Standardizer& standardizer() const noexcept { return standardizer_; }

  /// Raw mixture columns in, (estimate 1, estimate 2) out.
  std::pair<Matrix, Matrix> forward(const Matrix& mixtures) const;

  /// Same, for inputs already passed through standardizer().
  std::pair<Matrix, Matrix> forward_standardized(const Matrix& inputs) const;

  /// PIT loss and gradients for one batch of standardized inputs.
  PitBatch<Scalar> loss_and_gradients(const Matrix& inputs, const Matrix& target1,
                                      const Matrix& target2, Gradients& grads,
                                      bool permutation_invariant = true) const;

  Gradients zero_gradients() const;

  /// Concatenation encoder | decoder 1 | decoder 2.
  Vector flat_parameters() const;
  void set_flat_parameters(const Vector& flat);

 private:
  Network encoder_;
  Network decoder1_;
  Network decoder2_;
  Standardizer standardizer_;
};

extern template class BasicSeparatorModel<float>;
extern template class BasicSeparatorModel<double>;

using SeparatorModel = BasicSeparatorModel<float>;

struct SeparatorArchitecture {
  std::size_t input_dim = 0;
  std::size_t latent_dim = 0;
  std::size_t parameter_budget = 0;
  std::size_t encoder_hidden_layers = 3;
  std::size_t decoder_hidden_layers = 2;
};

/// Plans widths with plan_separator and He-initializes every network.
SeparatorModel make_separator(const SeparatorArchitecture& arch, std::uint64_t seed);

/// Builds the three networks from a plan produced by plan_separator.
template <typename Scalar>
BasicSeparatorModel<Scalar> separator_from_plan(const BudgetPlan& plan);

}  // namespace csbss
