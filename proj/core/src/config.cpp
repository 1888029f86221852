#include "csbss/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "csbss/errors.hpp"

namespace csbss {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean '" + value + "' for key '" + key + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

template <typename T>
Setter number(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.*field = parse_number<T>(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dataset",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         try {
           c.dataset = parse_dataset_kind(v);
         } catch (const ParameterError& e) {
           throw ConfigError(e.what());
         }
       }},
      {"sensing_rate", number(&ExperimentConfig::sensing_rate)},
      {"parameter_budget", number(&ExperimentConfig::parameter_budget)},
      {"epochs", number(&ExperimentConfig::epochs)},
      {"batch_size", number(&ExperimentConfig::batch_size)},
      {"base_lr", number(&ExperimentConfig::base_lr)},
      {"latent_dim", number(&ExperimentConfig::latent_dim)},
      {"encoder_hidden_layers", number(&ExperimentConfig::encoder_hidden_layers)},
      {"decoder_hidden_layers", number(&ExperimentConfig::decoder_hidden_layers)},
      {"permutation_invariant",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.permutation_invariant = parse_bool(k, v);
       }},
      {"matrix_seed", number(&ExperimentConfig::matrix_seed)},
      {"model_seed", number(&ExperimentConfig::model_seed)},
      {"data_seed", number(&ExperimentConfig::data_seed)},
      {"train_mixtures", number(&ExperimentConfig::train_mixtures)},
      {"val_mixtures", number(&ExperimentConfig::val_mixtures)},
      {"test_mixtures", number(&ExperimentConfig::test_mixtures)},
      {"val_fraction", number(&ExperimentConfig::val_fraction)},
      {"classifier_epochs", number(&ExperimentConfig::classifier_epochs)},
      {"classifier_hidden_layers", number(&ExperimentConfig::classifier_hidden_layers)},
      {"classifier_width", number(&ExperimentConfig::classifier_width)},
      {"classifier_lr", number(&ExperimentConfig::classifier_lr)},
      {"save_mixtures",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.save_mixtures = parse_bool(k, v);
       }},
      {"data_dir",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.data_dir = v; }},
      {"output_dir",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
  };
  return table;
}

}  // namespace

ExperimentConfig desk_preset(DatasetKind dataset, double sensing_rate, std::size_t full_budget,
                             double budget_scale) {
  ExperimentConfig c;
  c.dataset = dataset;
  c.sensing_rate = sensing_rate;
  c.parameter_budget = static_cast<std::size_t>(std::llround(static_cast<double>(full_budget) * budget_scale));
  c.epochs = 30;
  c.train_mixtures = 20'000;
  c.val_mixtures = 2'000;
  c.test_mixtures = 4'000;
  return c;
}

ExperimentConfig full_preset(DatasetKind dataset, double sensing_rate, std::size_t full_budget) {
  ExperimentConfig c;
  c.dataset = dataset;
  c.sensing_rate = sensing_rate;
  c.parameter_budget = full_budget;
  c.epochs = 3000;
  c.train_mixtures = 100'000;
  c.val_mixtures = 10'000;
  c.test_mixtures = 10'000;
  return c;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(stripped).substr(0, eq));
    std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

void apply_key_values(ExperimentConfig& config, const std::map<std::string, std::string>& values) {
  const auto& table = setters();
  for (const auto& [key, value] : values) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second(config, key, value);
  }
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  apply_key_values(base, parse_key_values(buffer.str()));
  return base;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& entry : setters()) keys.push_back(entry.first);
  return keys;
}

std::string to_key_values(const ExperimentConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "dataset = " << to_string(c.dataset) << '\n'
      << "sensing_rate = " << c.sensing_rate << '\n'
      << "parameter_budget = " << c.parameter_budget << '\n'
      << "epochs = " << c.epochs << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "base_lr = " << c.base_lr << '\n'
      << "latent_dim = " << c.latent_dim << '\n'
      << "encoder_hidden_layers = " << c.encoder_hidden_layers << '\n'
      << "decoder_hidden_layers = " << c.decoder_hidden_layers << '\n'
      << "permutation_invariant = " << (c.permutation_invariant ? "true" : "false") << '\n'
      << "matrix_seed = " << c.matrix_seed << '\n'
      << "model_seed = " << c.model_seed << '\n'
      << "data_seed = " << c.data_seed << '\n'
      << "train_mixtures = " << c.train_mixtures << '\n'
      << "val_mixtures = " << c.val_mixtures << '\n'
      << "test_mixtures = " << c.test_mixtures << '\n'
      << "val_fraction = " << c.val_fraction << '\n'
      << "classifier_epochs = " << c.classifier_epochs << '\n'
      << "classifier_hidden_layers = " << c.classifier_hidden_layers << '\n'
      << "classifier_width = " << c.classifier_width << '\n'
      << "classifier_lr = " << c.classifier_lr << '\n'
      << "save_mixtures = " << (c.save_mixtures ? "true" : "false") << '\n'
      << "data_dir = " << c.data_dir.string() << '\n'
      << "output_dir = " << c.output_dir.string() << '\n';
  return out.str();
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.sensing_rate > 0.0 && c.sensing_rate <= 1.0, "sensing_rate must lie in (0, 1]");
  require(c.parameter_budget > 0, "parameter_budget must be positive");
  require(c.epochs > 0, "epochs must be positive");
  require(c.batch_size > 0, "batch_size must be positive");
  require(c.base_lr >= 0.0, "base_lr must be non-negative");
  require(c.latent_dim > 0, "latent_dim must be positive");
  require(c.train_mixtures > 0 && c.val_mixtures > 0 && c.test_mixtures > 0,
          "mixture counts must be positive");
  require(c.val_fraction > 0.0 && c.val_fraction < 1.0, "val_fraction must lie in (0, 1)");
  require(c.classifier_epochs > 0 && c.classifier_width > 0, "classifier settings must be positive");
  require(c.classifier_lr >= 0.0, "classifier_lr must be non-negative");
}

}  // namespace csbss
