#include "csbss/budget.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csbss/errors.hpp"

namespace csbss {

namespace {

std::vector<LayerShape> branch_shapes(const BranchSpec& b, std::size_t width) {
  std::vector<LayerShape> shapes;
  if (b.hidden_layers == 0) {
    shapes.push_back({b.input_dim, b.output_dim});
    return shapes;
  }
  shapes.push_back({b.input_dim, width});
  for (std::size_t i = 1; i < b.hidden_layers; ++i) shapes.push_back({width, width});
  shapes.push_back({width, b.output_dim});
  return shapes;
}

std::size_t total_parameters(std::span<const BranchSpec> branches, std::size_t width) {
  std::size_t total = 0;
  for (const auto& b : branches) total += branch_parameters(b, width);
  return total;
}

}  // namespace

std::size_t branch_parameters(const BranchSpec& branch, std::size_t width) {
  return count_parameters(branch_shapes(branch, width));
}

BudgetPlan build_to_budget(std::span<const BranchSpec> branches, std::size_t budget,
                           double tolerance) {
  if (branches.empty()) throw ParameterError("build_to_budget: no branches");
  for (const auto& b : branches) {
    if (b.input_dim == 0 || b.output_dim == 0) {
      throw ParameterError("build_to_budget: branch dimensions must be positive");
    }
  }
  // P(w) = a w^2 + b w + c
  double a = 0.0, lin = 0.0, c = 0.0;
  for (const auto& br : branches) {
    if (br.hidden_layers == 0) {
      c += static_cast<double>(br.input_dim * br.output_dim + br.output_dim);
      continue;
    }
    const double hidden = static_cast<double>(br.hidden_layers);
    a += hidden - 1.0;
    lin += static_cast<double>(br.input_dim) + 1.0 + (hidden - 1.0) + static_cast<double>(br.output_dim);
    c += static_cast<double>(br.output_dim);
  }
  const double target = static_cast<double>(budget);
  const std::size_t minimal = total_parameters(branches, 1);
  if (budget < minimal && lin > 0.0) {
    throw ParameterError("build_to_budget: budget " + std::to_string(budget) +
                         " is below the minimal cost " + std::to_string(minimal));
  }

  std::size_t width = 1;
  if (lin > 0.0) {
    double root;
    if (a > 0.0) {
      root = (-lin + std::sqrt(lin * lin + 4.0 * a * (target - c))) / (2.0 * a);
    } else {
      root = (target - c) / lin;
    }
    const auto lo = static_cast<std::size_t>(std::max(1.0, std::floor(root)));
    const auto hi = lo + 1;
    auto gap = [&](std::size_t w) {
      return std::abs(static_cast<double>(total_parameters(branches, w)) - target);
    };
    width = gap(lo) <= gap(hi) ? lo : hi;
  }

  BudgetPlan plan;
  plan.hidden_width = width;
  plan.parameter_count = total_parameters(branches, width);
  const double relative = std::abs(static_cast<double>(plan.parameter_count) - target) /
                          std::max(target, 1.0);
  if (relative > tolerance) {
    throw ParameterError("build_to_budget: closest plan has " + std::to_string(plan.parameter_count) +
                         " parameters, outside +-" + std::to_string(tolerance * 100.0) +
                         "% of budget " + std::to_string(budget));
  }
  for (const auto& b : branches) plan.branches.push_back(branch_shapes(b, width));
  return plan;
}

BudgetPlan build_to_budget(std::size_t input_dim, std::size_t output_dim, std::size_t budget,
                           std::size_t hidden_layers, double tolerance) {
  const BranchSpec spec{input_dim, output_dim, hidden_layers};
  return build_to_budget(std::span<const BranchSpec>(&spec, 1), budget, tolerance);
}

BudgetPlan plan_separator(std::size_t input_dim, std::size_t latent_dim, std::size_t budget,
                          std::size_t encoder_hidden_layers, std::size_t decoder_hidden_layers) {
  const BranchSpec branches[] = {
      {input_dim, 2 * latent_dim, encoder_hidden_layers},
      {latent_dim, input_dim, decoder_hidden_layers},
      {latent_dim, input_dim, decoder_hidden_layers},
  };
  return build_to_budget(branches, budget);
}

}  // namespace csbss
