#pragma once

#include <cstddef>
#include <initializer_list>

#include <Eigen/Dense>

namespace csbss {

/// Half-cosine decay from the base rate to zero over `horizon` steps; flat at
/// zero afterwards.
class CosineSchedule {
 public:
  CosineSchedule(double base_lr, std::size_t horizon);
  double operator()(std::size_t step) const noexcept;
  double base_lr() const noexcept { return base_lr_; }
  std::size_t horizon() const noexcept { return horizon_; }

 private:
  double base_lr_;
  std::size_t horizon_;
};

/// Adaptive-moment optimizer with bias correction over one or more parameter
/// blocks that share a single moment state.
class Adam {
 public:
  struct Block {
    mutable Eigen::Ref<Eigen::VectorXf> params;
    Eigen::Ref<const Eigen::VectorXf> grad;
  };

  explicit Adam(std::size_t parameter_count, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8);

  /// One update at learning rate `lr`. Block sizes must sum to parameter_count.
  void step(std::initializer_list<Block> blocks, double lr);

  std::size_t steps() const noexcept { return t_; }
  const Eigen::VectorXf& first_moment() const noexcept { return m_; }
  const Eigen::VectorXf& second_moment() const noexcept { return v_; }

 private:
  double beta1_, beta2_, epsilon_;
  std::size_t t_ = 0;
  Eigen::VectorXf m_;
  Eigen::VectorXf v_;
};

}  // namespace csbss
