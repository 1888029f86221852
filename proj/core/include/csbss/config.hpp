#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "csbss/dataset.hpp"

namespace csbss {

struct ExperimentConfig {
  DatasetKind dataset = DatasetKind::mnist;
  double sensing_rate = 0.5;  // 1.0 selects the identity (no compression) path
  std::size_t parameter_budget = 400'000;
  std::size_t epochs = 30;
  std::size_t batch_size = 128;
  double base_lr = 1e-3;
  std::size_t latent_dim = 64;
  std::size_t encoder_hidden_layers = 3;
  std::size_t decoder_hidden_layers = 2;
  bool permutation_invariant = true;

  std::uint64_t matrix_seed = 7;
  std::uint64_t model_seed = 1;
  std::uint64_t data_seed = 2;

  std::size_t train_mixtures = 20'000;
  std::size_t val_mixtures = 2'000;
  std::size_t test_mixtures = 4'000;
  double val_fraction = 0.1;

  std::size_t classifier_epochs = 20;
  std::size_t classifier_hidden_layers = 2;
  std::size_t classifier_width = 256;
  double classifier_lr = 1e-3;

  bool save_mixtures = false;
  std::filesystem::path data_dir = "data";
  std::filesystem::path output_dir = "runs/default";

  bool compressed() const noexcept { return sensing_rate < 1.0; }
};

/// Desk-scale run: 20000/2000/4000 mixtures, 30 epochs, the published
/// parameter budget times `budget_scale`.
ExperimentConfig desk_preset(DatasetKind dataset, double sensing_rate, std::size_t full_budget,
                             double budget_scale = 0.4);

/// Long-running reproduction settings (3000 epochs, full budget).
ExperimentConfig full_preset(DatasetKind dataset, double sensing_rate, std::size_t full_budget);

/// Parses `key = value` lines; `#` starts a comment; blank lines are ignored.
/// Throws ConfigError naming the line on malformed input or duplicate keys.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Applies overrides on top of `config`. Unknown keys and unparsable values
/// throw ConfigError.
void apply_key_values(ExperimentConfig& config, const std::map<std::string, std::string>& values);

ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  ExperimentConfig base = ExperimentConfig{});

/// Every key accepted by apply_key_values, in sorted order.
std::vector<std::string> config_keys();

/// Serializes every key in a form parse_key_values accepts.
std::string to_key_values(const ExperimentConfig& config);

/// Throws ConfigError for values outside their domain.
void validate(const ExperimentConfig& config);

}  // namespace csbss
