#include "csbss/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csbss/checkpoint.hpp"
#include "csbss/content_hash.hpp"
#include "csbss/dataset.hpp"
#include "csbss/rng.hpp"
#include "csbss/separator.hpp"
#include "csbss/training.hpp"

namespace csbss {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
auto stage(const std::string& name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const PipelineError&) {
    throw;
  } catch (const ConfigError& e) {
    throw PipelineError(name, PipelineError::Kind::config, e.what());
  } catch (const ParseError& e) {
    throw PipelineError(name, PipelineError::Kind::data, e.what());
  } catch (const DivergenceError& e) {
    throw PipelineError(name, PipelineError::Kind::divergence, e.what());
  } catch (const TheoremViolation& e) {
    throw PipelineError(name, PipelineError::Kind::theorem, e.what());
  } catch (const std::exception& e) {
    throw PipelineError(name, PipelineError::Kind::other, e.what());
  }
}

std::size_t input_dim_of(const ExperimentConfig& config) {
  return config.compressed() ? measurement_count(kImagePixels, config.sensing_rate) : kImagePixels;
}

ClassifierOptions classifier_options(const ExperimentConfig& config, std::size_t classes) {
  ClassifierOptions o;
  o.classes = classes;
  o.hidden_layers = config.classifier_hidden_layers;
  o.hidden_width = config.classifier_width;
  o.epochs = config.classifier_epochs;
  o.batch_size = config.batch_size;
  o.base_lr = config.classifier_lr;
  o.seed = derive_seed(config.model_seed, 101);
  return o;
}

void write_log(const std::filesystem::path& path, const std::vector<EpochLog>& log) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_training_log_csv(out, log);
}

RunReport classify(const ExperimentConfig& config, const SeparatorModel& separator,
                   const PreparedData& data, RunReport report, std::ostream* progress) {
  const auto start = Clock::now();
  const ClassifierResult result = stage("classifier", [&] {
    if (progress) *progress << "training classifier on separated outputs\n";
    return train_classifier(separator, data.train, data.test,
                            classifier_options(config, data.classes));
  });
  write_log(config.output_dir / "classifier_log.csv", result.log);
  report.top1_accuracy = result.top1_accuracy;
  report.test_slots = 2 * data.test.size();
  report.test_pit_loss = evaluate_pit(separator, data.test, 512, config.permutation_invariant);
  report.classifier_seconds = seconds_since(start);

  std::ofstream out(config.output_dir / "report.jsonl", std::ios::app);
  if (!out) throw Error("cannot append to report.jsonl");
  out << to_json_line(report) << '\n';
  if (progress) {
    *progress << "top-1 accuracy " << report.top1_accuracy << " over " << report.test_slots
              << " separated images\n";
  }
  return report;
}

RunReport base_report(const ExperimentConfig& config) {
  RunReport r;
  r.dataset = to_string(config.dataset);
  r.sensing_rate = config.sensing_rate;
  r.measurements = input_dim_of(config);
  r.parameter_budget = config.parameter_budget;
  r.epochs = config.epochs;
  return r;
}

}  // namespace

std::string to_json_line(const RunReport& r) {
  nlohmann::json j = {
      {"dataset", r.dataset},
      {"sensing_rate", r.sensing_rate},
      {"measurements", r.measurements},
      {"parameter_budget", r.parameter_budget},
      {"parameter_count", r.parameter_count},
      {"epochs", r.epochs},
      {"best_epoch", r.best_epoch},
      {"best_val_loss", r.best_val_loss},
      {"test_pit_loss", r.test_pit_loss},
      {"top1_accuracy", r.top1_accuracy},
      {"test_slots", r.test_slots},
      {"checkpoint_hash", r.checkpoint_hash},
      {"parameter_hash", r.parameter_hash},
      {"separator_seconds", r.separator_seconds},
      {"classifier_seconds", r.classifier_seconds},
  };
  return j.dump();
}

RunReport report_from_json(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    RunReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.sensing_rate = j.at("sensing_rate").get<double>();
    r.measurements = j.at("measurements").get<std::size_t>();
    r.parameter_budget = j.at("parameter_budget").get<std::size_t>();
    r.parameter_count = j.at("parameter_count").get<std::size_t>();
    r.epochs = j.at("epochs").get<std::size_t>();
    r.best_epoch = j.at("best_epoch").get<std::size_t>();
    r.best_val_loss = j.at("best_val_loss").get<double>();
    r.test_pit_loss = j.at("test_pit_loss").get<double>();
    r.top1_accuracy = j.at("top1_accuracy").get<double>();
    r.test_slots = j.at("test_slots").get<std::size_t>();
    r.checkpoint_hash = j.at("checkpoint_hash").get<std::string>();
    r.parameter_hash = j.at("parameter_hash").get<std::string>();
    r.separator_seconds = j.at("separator_seconds").get<double>();
    r.classifier_seconds = j.at("classifier_seconds").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report line: ") + e.what());
  }
}

std::optional<RunReport> read_latest_report(const std::filesystem::path& run_dir) {
  std::ifstream in(run_dir / "report.jsonl");
  if (!in) return std::nullopt;
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  if (last.empty()) return std::nullopt;
  return report_from_json(last);
}

PreparedData prepare_data(const ExperimentConfig& config) {
  PreparedData out;
  const ImageDataset full_train = stage("data", [&] {
    return load_dataset(config.data_dir, config.dataset, "train");
  });
  const ImageDataset test = stage("data", [&] {
    return load_dataset(config.data_dir, config.dataset, "test");
  });
  out.classes = full_train.class_count;

  auto [train, val] = stage("data", [&] {
    return make_splits(full_train, config.val_fraction, derive_seed(config.data_seed, 0));
  });

  if (config.compressed()) {
    out.phi = stage("sensing", [&] {
      return SensingMatrix::generate(config.matrix_seed, kImagePixels, config.sensing_rate);
    });
  }
  const SensingMatrix* phi = out.phi ? &*out.phi : nullptr;

  stage("mixing", [&] {
    out.train = build_mixture_dataset(train.images, train.labels, 2, config.train_mixtures,
                                      derive_seed(config.data_seed, 1), phi);
    out.val = build_mixture_dataset(val.images, val.labels, 2, config.val_mixtures,
                                    derive_seed(config.data_seed, 2), phi);
    out.test = build_mixture_dataset(test.images, test.labels, 2, config.test_mixtures,
                                     derive_seed(config.data_seed, 3), phi);
    return 0;
  });
  return out;
}

RunReport run_bss_experiment(const ExperimentConfig& config, std::ostream* progress) {
  stage("config", [&] {
    validate(config);
    return 0;
  });
  std::filesystem::create_directories(config.output_dir);
  {
    std::ofstream out(config.output_dir / "config.txt");
    out << to_key_values(config);
  }

  const PreparedData data = prepare_data(config);
  if (data.phi) data.phi->save(config.output_dir / "sensing_matrix.cspm");
  if (config.save_mixtures) {
    data.train.save(config.output_dir / "train.csmx");
    data.val.save(config.output_dir / "val.csmx");
    data.test.save(config.output_dir / "test.csmx");
  }
  if (progress) {
    *progress << to_string(config.dataset) << " rate " << config.sensing_rate << ": "
              << data.train.size() << '/' << data.val.size() << '/' << data.test.size()
              << " mixtures of dimension " << data.train.dim << '\n';
  }

  RunReport report = base_report(config);
  const auto start = Clock::now();
  SeparatorTrainingResult trained = stage("separator", [&] {
    SeparatorArchitecture arch;
    arch.input_dim = data.train.dim;
    arch.latent_dim = config.latent_dim;
    arch.parameter_budget = config.parameter_budget;
    arch.encoder_hidden_layers = config.encoder_hidden_layers;
    arch.decoder_hidden_layers = config.decoder_hidden_layers;
    SeparatorModel model = make_separator(arch, config.model_seed);
    if (progress) *progress << "separator parameters " << model.parameter_count() << '\n';

    SeparatorTrainingOptions options;
    options.epochs = config.epochs;
    options.batch_size = config.batch_size;
    options.base_lr = config.base_lr;
    options.seed = derive_seed(config.model_seed, 100);
    options.permutation_invariant = config.permutation_invariant;
    options.fit_standardizer = config.compressed();
    if (progress) {
      options.on_epoch = [progress](const EpochLog& e) {
        *progress << "epoch " << e.epoch << " train " << e.train_loss << " val " << e.val_loss
                  << " lr " << e.lr << " (" << static_cast<long>(e.wall_ms) << " ms)\n";
      };
    }
    return train_separator(std::move(model), data.train, data.val, options);
  });
  report.separator_seconds = seconds_since(start);
  write_log(config.output_dir / "separator_log.csv", trained.log);

  const auto checkpoint = config.output_dir / "separator.csnn";
  save_checkpoint(checkpoint, trained.model);
  report.parameter_count = trained.model.parameter_count();
  report.best_epoch = trained.state.best_epoch;
  report.best_val_loss = trained.state.best_val_loss;
  report.checkpoint_hash = git_blob_hash_file(checkpoint);
  report.parameter_hash = parameter_hash(trained.model.flat_parameters());

  return classify(config, trained.model, data, std::move(report), progress);
}

RunReport evaluate_run(const ExperimentConfig& config, std::ostream* progress) {
  stage("config", [&] {
    validate(config);
    return 0;
  });
  const auto checkpoint = config.output_dir / "separator.csnn";
  const SeparatorModel model = stage("checkpoint", [&] { return load_checkpoint(checkpoint); });
  const PreparedData data = prepare_data(config);
  if (model.input_dim() != data.train.dim) {
    throw PipelineError("checkpoint", PipelineError::Kind::config,
                        "checkpoint input dimension " + std::to_string(model.input_dim()) +
                            " does not match the configured measurement count " +
                            std::to_string(data.train.dim));
  }

  RunReport report = base_report(config);
  if (const auto previous = read_latest_report(config.output_dir)) {
    report.best_epoch = previous->best_epoch;
    report.best_val_loss = previous->best_val_loss;
    report.separator_seconds = previous->separator_seconds;
  }
  report.parameter_count = model.parameter_count();
  report.checkpoint_hash = git_blob_hash_file(checkpoint);
  report.parameter_hash = parameter_hash(model.flat_parameters());
  return classify(config, model, data, std::move(report), progress);
}

double TheoremSuiteResult::max_ratio() const {
  double m = 0.0;
  for (const auto& s : sweeps) m = std::max(m, s.report.max_ratio);
  return m;
}

double TheoremSuiteResult::aligned_min_ratio() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : sweeps) {
    if (s.mode == PerturbedReconstruction::Mode::aligned && s.epsilon > 0.0) {
      m = std::min(m, s.report.max_ratio);
    }
  }
  return m;
}

bool TheoremSuiteResult::ok() const {
  return exact.ok() && std::all_of(sweeps.begin(), sweeps.end(),
                                   [](const BoundSweep& s) { return s.report.ok(); });
}

std::vector<std::string> TheoremSuiteResult::violations() const {
  std::vector<std::string> out;
  for (const auto id : exact.failures) out.push_back("exact composition: mixture " + std::to_string(id));
  for (const auto& s : sweeps) {
    for (const auto id : s.report.violations) {
      std::ostringstream line;
      line << "bound k=" << s.k << " epsilon=" << s.epsilon << " seed=" << s.seed
           << ": mixture " << id;
      out.push_back(line.str());
    }
  }
  return out;
}

TheoremSuiteResult verify_theorems(const TheoremSuiteOptions& o,
                                   const std::filesystem::path* csv_dir) {
  if (o.signals < o.exact_k || o.exact_k == 0) throw ParameterError("verify_theorems: too few signals");
  TheoremSuiteResult result;

  const SignalSet set = make_sparse_signal_set(o.signals, o.ambient_dim, o.sparsity, o.seed);
  const SensingMatrix phi = SensingMatrix::generate(derive_seed(o.seed, 1), o.ambient_dim, o.sensing_rate);
  const auto family = enumerate_mixture_family(set, o.exact_k);
  const LookupOracle oracle(family);
  const LookupReconstruction reconstruct(phi, family_domain(set, family));
  const auto compressed = compose_compressed_oracle(
      phi, oracle, [&reconstruct](const Eigen::VectorXd& y) { return reconstruct(y); });
  result.exact = verify_theorem1(compressed, family);

  using Mode = PerturbedReconstruction::Mode;
  for (const auto k : o.bound_ks) {
    for (std::size_t s = 0; s < o.bound_seeds; ++s) {
      const std::uint64_t seed = derive_seed(o.seed, 1000 + 97 * k + s);
      const SignalSet base = make_sparse_signal_set(o.signals, o.ambient_dim, o.sparsity, seed);
      const SensingMatrix sweep_phi =
          SensingMatrix::generate(derive_seed(seed, 1), o.ambient_dim, o.sensing_rate);
      const auto mixtures = build_mixture_family(base, k, o.bound_mixtures, derive_seed(seed, 2));
      const LookupOracle sweep_oracle(mixtures);
      for (const double eps : o.epsilons) {
        for (const Mode mode : {Mode::random, Mode::aligned}) {
          const PerturbedReconstruction r(sweep_phi, base, mixtures, eps, derive_seed(seed, 3), mode);
          result.sweeps.push_back({k, eps, seed, mode, verify_theorem2(sweep_phi, sweep_oracle, r, mixtures)});
        }
      }
    }
  }

  if (csv_dir) {
    std::filesystem::create_directories(*csv_dir);
    std::ofstream exact(*csv_dir / "exact.csv");
    exact << "mixtures,max_abs_error,failures\n"
          << result.exact.mixtures << ',' << result.exact.max_abs_error << ','
          << result.exact.failures.size() << '\n';
    std::ofstream bound(*csv_dir / "bound.csv");
    bound.precision(17);
    bound << "k,epsilon,seed,mode,mixture_id,lhs,rhs,ratio\n";
    for (const auto& s : result.sweeps) {
      for (const auto& row : s.report.rows) {
        bound << s.k << ',' << s.epsilon << ',' << s.seed << ','
              << (s.mode == Mode::aligned ? "aligned" : "random") << ',' << row.mixture_id << ','
              << row.lhs << ',' << row.rhs << ',' << row.ratio << '\n';
      }
    }
  }
  return result;
}

}  // namespace csbss
