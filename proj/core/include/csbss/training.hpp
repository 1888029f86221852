#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "csbss/mixing.hpp"
#include "csbss/network.hpp"
#include "csbss/separator.hpp"

namespace csbss {

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;  // rate at the last step of the epoch
  double wall_ms = 0.0;
};

/// epoch,train_loss,val_loss,lr,wall_ms
void write_training_log_csv(std::ostream& out, const std::vector<EpochLog>& log);

struct SeparatorTrainingOptions {
  std::size_t epochs = 30;
  std::size_t batch_size = 128;
  double base_lr = 1e-3;
  std::uint64_t seed = 0;
  bool permutation_invariant = true;
  double divergence_threshold = 1e6;
  /// Fit the input standardizer on the training mixtures before training.
  bool fit_standardizer = true;
  std::function<void(const EpochLog&)> on_epoch;
};

/// Optimizer-side state of a run; the best snapshot is only replaced on a
/// strict validation improvement.
struct TrainState {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double best_val_loss = 0.0;
  std::size_t best_epoch = 0;
  Eigen::VectorXf best_parameters;
};

struct SeparatorTrainingResult {
  SeparatorModel model;  // parameters of the best validation epoch
  std::vector<EpochLog> log;
  TrainState state;
};

/// Mini-batch Adam on the PIT loss with cosine decay over epochs * batches
/// steps, per-epoch validation, best-snapshot selection. Throws
/// DivergenceError on a non-finite or exploding batch loss.
SeparatorTrainingResult train_separator(SeparatorModel model, const MixtureDataset& train,
                                        const MixtureDataset& val,
                                        const SeparatorTrainingOptions& options);

/// Mean PIT loss of `model` over a k=2 dataset.
double evaluate_pit(const SeparatorModel& model, const MixtureDataset& data,
                    std::size_t batch_size = 512, bool permutation_invariant = true);

/// Separated outputs of every mixture (two columns per mixture, slot order)
/// labelled through the PIT assignment against the ground-truth components.
struct SlotDataset {
  Eigen::MatrixXf inputs;  // d x 2n
  std::vector<int> labels;
};

SlotDataset separate_slots(const SeparatorModel& frozen, const MixtureDataset& data,
                           std::size_t batch_size = 512);

struct ClassifierOptions {
  std::size_t classes = 10;
  std::size_t hidden_layers = 2;
  std::size_t hidden_width = 256;
  std::size_t epochs = 20;
  std::size_t batch_size = 128;
  double base_lr = 1e-3;
  std::uint64_t seed = 0;
};

struct Classifier {
  DenseNetwork network;
  Standardizer standardizer;

  std::vector<int> predict(const Eigen::MatrixXf& inputs) const;
};

struct ClassifierResult {
  Classifier classifier;
  double top1_accuracy = 0.0;  // on the held-out slots
  std::vector<EpochLog> log;   // val_loss column holds held-out accuracy
};

/// Fraction of columns whose argmax class equals the label.
double top1_accuracy(const Classifier& classifier, const SlotDataset& data);

/// Trains a classifier on the frozen separator's outputs for `train` and
/// reports per-slot top-1 accuracy on `test`. The separator is only read.
ClassifierResult train_classifier(const SeparatorModel& frozen, const MixtureDataset& train,
                                  const MixtureDataset& test, const ClassifierOptions& options);

/// Same, from precomputed slot datasets.
ClassifierResult train_classifier(const SlotDataset& train, const SlotDataset& test,
                                  const ClassifierOptions& options);

}  // namespace csbss
