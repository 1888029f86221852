#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "csbss/config.hpp"
#include "csbss/errors.hpp"
#include "csbss/mixing.hpp"
#include "csbss/sensing.hpp"
#include "csbss/theorem_harness.hpp"

namespace csbss {

/// Error raised by a pipeline stage; keeps the stage name and the category of
/// the underlying failure so callers can map it to an exit status.
class PipelineError : public Error {
 public:
  enum class Kind { config, data, divergence, theorem, other };

  PipelineError(std::string stage, Kind kind, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)), kind_(kind) {}

  const std::string& stage() const noexcept { return stage_; }
  Kind kind() const noexcept { return kind_; }

 private:
  std::string stage_;
  Kind kind_;
};

struct RunReport {
  std::string dataset;
  double sensing_rate = 0.0;
  std::size_t measurements = 0;
  std::size_t parameter_budget = 0;
  std::size_t parameter_count = 0;
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  double test_pit_loss = 0.0;
  double top1_accuracy = 0.0;
  std::size_t test_slots = 0;
  std::string checkpoint_hash;
  std::string parameter_hash;
  double separator_seconds = 0.0;
  double classifier_seconds = 0.0;
};

std::string to_json_line(const RunReport& report);
RunReport report_from_json(const std::string& line);

/// Last report line of `<dir>/report.jsonl`, if present.
std::optional<RunReport> read_latest_report(const std::filesystem::path& run_dir);

struct PreparedData {
  std::optional<SensingMatrix> phi;  // empty on the identity path
  MixtureDataset train;
  MixtureDataset val;
  MixtureDataset test;
  std::size_t classes = 0;
};

/// Loads the images, splits train/validation, draws Φ and builds the three
/// mixture datasets in the measurement domain.
PreparedData prepare_data(const ExperimentConfig& config);

/// Full pipeline: data, separator training, checkpoint, frozen-separator
/// classifier, accuracy. Writes config.txt, separator.csnn, separator_log.csv,
/// classifier_log.csv and appends to report.jsonl under config.output_dir.
RunReport run_bss_experiment(const ExperimentConfig& config, std::ostream* progress = nullptr);

/// Classifier stage only, from the checkpoint a previous run left in
/// config.output_dir.
RunReport evaluate_run(const ExperimentConfig& config, std::ostream* progress = nullptr);

struct TheoremSuiteOptions {
  std::size_t signals = 50;
  std::size_t ambient_dim = 128;
  double sensing_rate = 0.5;
  std::size_t sparsity = 4;
  std::size_t exact_k = 2;
  std::uint64_t seed = 0;
  std::vector<double> epsilons{1e-3, 1e-2, 1e-1};
  std::vector<std::size_t> bound_ks{2, 3};
  std::size_t bound_mixtures = 1000;
  std::size_t bound_seeds = 20;
};

struct BoundSweep {
  std::size_t k = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  PerturbedReconstruction::Mode mode = PerturbedReconstruction::Mode::random;
  BoundReport report;
};

struct TheoremSuiteResult {
  Theorem1Report exact;
  std::vector<BoundSweep> sweeps;

  double max_ratio() const;
  /// Smallest per-sweep max ratio among aligned sweeps with epsilon > 0.
  double aligned_min_ratio() const;
  bool ok() const;
  /// One line per offending mixture id.
  std::vector<std::string> violations() const;
};

/// Exhaustive exact-composition check over every k-subset of a synthetic
/// sparse signal set, then the perturbed-reconstruction bound sweep over
/// (k, epsilon, seed) in random and aligned modes. With `csv_dir`, writes
/// exact.csv and bound.csv there.
TheoremSuiteResult verify_theorems(const TheoremSuiteOptions& options,
                                   const std::filesystem::path* csv_dir = nullptr);

}  // namespace csbss
