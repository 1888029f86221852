#include "csbss/losses.hpp"

namespace csbss {

PitResult pit_loss(const Eigen::VectorXd& out1, const Eigen::VectorXd& out2,
                   const Eigen::VectorXd& target1, const Eigen::VectorXd& target2) {
  const auto d = out1.size();
  if (d == 0 || out2.size() != d || target1.size() != d || target2.size() != d) {
    throw DimensionError("pit_loss: all four vectors must share one nonzero length");
  }
  const double inv_d = 1.0 / static_cast<double>(d);
  const double same = ((out1 - target1).squaredNorm() + (out2 - target2).squaredNorm()) * inv_d;
  const double crossed = ((out1 - target2).squaredNorm() + (out2 - target1).squaredNorm()) * inv_d;
  if (crossed < same) return {crossed, Assignment::swap};
  return {same, Assignment::identity};
}

}  // namespace csbss
