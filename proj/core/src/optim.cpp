#include "csbss/optim.hpp"

#include <cmath>
#include <numbers>

#include "csbss/errors.hpp"

namespace csbss {

CosineSchedule::CosineSchedule(double base_lr, std::size_t horizon)
    : base_lr_(base_lr), horizon_(horizon) {
  if (!(base_lr >= 0.0)) throw ParameterError("CosineSchedule: base learning rate must be >= 0");
  if (horizon == 0) throw ParameterError("CosineSchedule: horizon must be positive");
}

double CosineSchedule::operator()(std::size_t step) const noexcept {
  if (step >= horizon_) return 0.0;
  const double progress = static_cast<double>(step) / static_cast<double>(horizon_);
  return 0.5 * base_lr_ * (1.0 + std::cos(std::numbers::pi * progress));
}

Adam::Adam(std::size_t parameter_count, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon),
      m_(Eigen::VectorXf::Zero(static_cast<Eigen::Index>(parameter_count))),
      v_(Eigen::VectorXf::Zero(static_cast<Eigen::Index>(parameter_count))) {}

void Adam::step(std::initializer_list<Block> blocks, double lr) {
  Eigen::Index total = 0;
  for (const auto& b : blocks) {
    if (b.params.size() != b.grad.size()) throw DimensionError("Adam: params/grad length mismatch");
    total += b.params.size();
  }
  if (total != m_.size()) throw DimensionError("Adam: blocks do not cover the moment state");

  ++t_;
  const auto b1 = static_cast<float>(beta1_);
  const auto b2 = static_cast<float>(beta2_);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const auto step_size = static_cast<float>(lr / c1);
  const auto sqrt_c2 = static_cast<float>(std::sqrt(c2));
  const auto eps = static_cast<float>(epsilon_);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    const auto n = b.params.size();
    auto m = m_.segment(at, n);
    auto v = v_.segment(at, n);
    m = b1 * m + (1.0f - b1) * b.grad;
    v = b2 * v + (1.0f - b2) * b.grad.cwiseAbs2();
    if (lr != 0.0) {
      b.params.array() -= step_size * m.array() / (v.array().sqrt() / sqrt_c2 + eps);
    }
    at += n;
  }
}

}  // namespace csbss
