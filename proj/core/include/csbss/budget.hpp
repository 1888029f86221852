#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "csbss/network.hpp"

namespace csbss {

/// One fully connected branch: input -> hidden_layers x width -> output.
struct BranchSpec {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::size_t hidden_layers = 0;
};

struct BudgetPlan {
  std::size_t hidden_width = 0;
  std::vector<std::vector<LayerShape>> branches;  // one shape list per BranchSpec
  std::size_t parameter_count = 0;
};

/// Parameter count of a branch at a given hidden width.
std::size_t branch_parameters(const BranchSpec& branch, std::size_t width);

/// Solves one hidden width shared by all branches so the total parameter count
/// lands within `tolerance` (relative) of `budget`. The count is quadratic in
/// the width; the nearest integer root is checked and the closer of its
/// neighbours kept. Throws ParameterError when no width fits.
BudgetPlan build_to_budget(std::span<const BranchSpec> branches, std::size_t budget,
                           double tolerance = 0.05);

/// Single-network convenience overload.
BudgetPlan build_to_budget(std::size_t input_dim, std::size_t output_dim, std::size_t budget,
                           std::size_t hidden_layers, double tolerance = 0.05);

/// Encoder d -> 2*latent plus two decoders latent -> d sharing one width.
BudgetPlan plan_separator(std::size_t input_dim, std::size_t latent_dim, std::size_t budget,
                          std::size_t encoder_hidden_layers = 3,
                          std::size_t decoder_hidden_layers = 2);

}  // namespace csbss
