#include "csbss/separator.hpp"

#include <string>

#include "csbss/errors.hpp"
#include "csbss/rng.hpp"

namespace csbss {

template <typename Scalar>
BasicSeparatorModel<Scalar>::BasicSeparatorModel(Network encoder, Network decoder1,
                                                 Network decoder2)
    : encoder_(std::move(encoder)), decoder1_(std::move(decoder1)), decoder2_(std::move(decoder2)) {
  const std::size_t out = encoder_.output_dim();
  if (out == 0 || out % 2 != 0) {
    throw DimensionError("SeparatorModel: encoder output width must be even, got " +
                         std::to_string(out));
  }
  const std::size_t latent = out / 2;
  for (const Network* dec : {&decoder1_, &decoder2_}) {
    if (dec->input_dim() != latent || dec->output_dim() != encoder_.input_dim()) {
      throw DimensionError("SeparatorModel: decoders must map latent " + std::to_string(latent) +
                           " -> " + std::to_string(encoder_.input_dim()));
    }
  }
}

template <typename Scalar>
std::pair<typename BasicSeparatorModel<Scalar>::Matrix, typename BasicSeparatorModel<Scalar>::Matrix>
BasicSeparatorModel<Scalar>::forward(const Matrix& mixtures) const {
  if (standardizer_.empty()) return forward_standardized(mixtures);
  const Eigen::MatrixXf scaled = standardizer_.apply(mixtures.template cast<float>());
  return forward_standardized(scaled.template cast<Scalar>());
}

template <typename Scalar>
std::pair<typename BasicSeparatorModel<Scalar>::Matrix, typename BasicSeparatorModel<Scalar>::Matrix>
BasicSeparatorModel<Scalar>::forward_standardized(const Matrix& inputs) const {
  const Matrix latent = encoder_.forward(inputs);
  const auto half = static_cast<Eigen::Index>(latent_dim());
  return {decoder1_.forward(latent.topRows(half)), decoder2_.forward(latent.bottomRows(half))};
}

template <typename Scalar>
PitBatch<Scalar> BasicSeparatorModel<Scalar>::loss_and_gradients(const Matrix& inputs,
                                                                 const Matrix& target1,
                                                                 const Matrix& target2,
                                                                 Gradients& grads,
                                                                 bool permutation_invariant) const {
  typename Network::Tape enc_tape, dec1_tape, dec2_tape;
  const Matrix latent = encoder_.forward(inputs, enc_tape);
  const auto half = static_cast<Eigen::Index>(latent_dim());
  const Matrix out1 = decoder1_.forward(latent.topRows(half), dec1_tape);
  const Matrix out2 = decoder2_.forward(latent.bottomRows(half), dec2_tape);
  PitBatch<Scalar> pit = pit_loss_batch<Scalar>(out1, out2, target1, target2, permutation_invariant);

  Matrix dlatent(latent.rows(), latent.cols());
  dlatent.topRows(half) = decoder1_.backward(dec1_tape, pit.grad1, grads.decoder1);
  dlatent.bottomRows(half) = decoder2_.backward(dec2_tape, pit.grad2, grads.decoder2);
  encoder_.backward(enc_tape, dlatent, grads.encoder);
  return pit;
}

template <typename Scalar>
typename BasicSeparatorModel<Scalar>::Gradients BasicSeparatorModel<Scalar>::zero_gradients() const {
  return {Vector::Zero(static_cast<Eigen::Index>(encoder_.parameter_count())),
          Vector::Zero(static_cast<Eigen::Index>(decoder1_.parameter_count())),
          Vector::Zero(static_cast<Eigen::Index>(decoder2_.parameter_count()))};
}

template <typename Scalar>
typename BasicSeparatorModel<Scalar>::Vector BasicSeparatorModel<Scalar>::flat_parameters() const {
  Vector flat(static_cast<Eigen::Index>(parameter_count()));
  flat << encoder_.parameters(), decoder1_.parameters(), decoder2_.parameters();
  return flat;
}

template <typename Scalar>
void BasicSeparatorModel<Scalar>::set_flat_parameters(const Vector& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
    throw DimensionError("SeparatorModel::set_flat_parameters: length mismatch");
  }
  const auto e = encoder_.parameters().size();
  const auto d1 = decoder1_.parameters().size();
  const auto d2 = decoder2_.parameters().size();
  encoder_.parameters() = flat.head(e);
  decoder1_.parameters() = flat.segment(e, d1);
  decoder2_.parameters() = flat.tail(d2);
}

template <typename Scalar>
BasicSeparatorModel<Scalar> separator_from_plan(const BudgetPlan& plan) {
  if (plan.branches.size() != 3) throw ParameterError("separator_from_plan: expected 3 branches");
  auto build = [](const std::vector<LayerShape>& shapes) {
    std::vector<Activation> acts(shapes.size(), Activation::relu);
    acts.back() = Activation::identity;
    return BasicDenseNetwork<Scalar>(shapes, acts);
  };
  return BasicSeparatorModel<Scalar>(build(plan.branches[0]), build(plan.branches[1]),
                                     build(plan.branches[2]));
}

template class BasicSeparatorModel<float>;
template class BasicSeparatorModel<double>;
template BasicSeparatorModel<float> separator_from_plan<float>(const BudgetPlan&);
template BasicSeparatorModel<double> separator_from_plan<double>(const BudgetPlan&);

SeparatorModel make_separator(const SeparatorArchitecture& arch, std::uint64_t seed) {
  const BudgetPlan plan = plan_separator(arch.input_dim, arch.latent_dim, arch.parameter_budget,
                                         arch.encoder_hidden_layers, arch.decoder_hidden_layers);
  SeparatorModel model = separator_from_plan<float>(plan);
  model.encoder().init_he(derive_seed(seed, 1));
  model.decoder(0).init_he(derive_seed(seed, 2));
  model.decoder(1).init_he(derive_seed(seed, 3));
  return model;
}

}  // namespace csbss
