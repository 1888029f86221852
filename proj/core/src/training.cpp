#include "csbss/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>

#include "csbss/errors.hpp"
#include "csbss/losses.hpp"
#include "csbss/optim.hpp"
#include "csbss/rng.hpp"

namespace csbss {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

Eigen::MatrixXf gather(const Eigen::MatrixXf& source, std::span<const std::size_t> columns) {
  Eigen::MatrixXf out(source.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = source.col(static_cast<Eigen::Index>(columns[j]));
  }
  return out;
}

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

void require_pairs(const MixtureDataset& data, const char* what) {
  if (data.size() == 0) throw ParameterError(std::string(what) + ": dataset is empty");
  if (data.k() != 2) throw ParameterError(std::string(what) + ": two-source datasets only");
}

}  // namespace

void write_training_log_csv(std::ostream& out, const std::vector<EpochLog>& log) {
  out << "epoch,train_loss,val_loss,lr,wall_ms\n";
  out.precision(9);
  for (const auto& row : log) {
    out << row.epoch << ',' << row.train_loss << ',' << row.val_loss << ',' << row.lr << ','
        << row.wall_ms << '\n';
  }
}

double evaluate_pit(const SeparatorModel& model, const MixtureDataset& data, std::size_t batch_size,
                    bool permutation_invariant) {
  require_pairs(data, "evaluate_pit");
  double total = 0.0;
  const auto n = static_cast<Eigen::Index>(data.size());
  for (Eigen::Index start = 0; start < n; start += static_cast<Eigen::Index>(batch_size)) {
    const auto width = std::min<Eigen::Index>(static_cast<Eigen::Index>(batch_size), n - start);
    auto [o1, o2] = model.forward(data.mixtures.middleCols(start, width));
    const Eigen::MatrixXf t1 = data.components[0].middleCols(start, width);
    const Eigen::MatrixXf t2 = data.components[1].middleCols(start, width);
    total += pit_loss_batch<float>(o1, o2, t1, t2, permutation_invariant).loss *
             static_cast<double>(width);
  }
  return total / static_cast<double>(n);
}

SeparatorTrainingResult train_separator(SeparatorModel model, const MixtureDataset& train,
                                        const MixtureDataset& val,
                                        const SeparatorTrainingOptions& options) {
  require_pairs(train, "train_separator");
  require_pairs(val, "train_separator");
  if (train.dim != model.input_dim() || val.dim != model.input_dim()) {
    throw DimensionError("train_separator: dataset dimension does not match the model input");
  }
  if (options.epochs == 0 || options.batch_size == 0) {
    throw ParameterError("train_separator: epochs and batch size must be positive");
  }
  if (options.fit_standardizer) model.standardizer() = Standardizer::fit(train.mixtures);
  const Eigen::MatrixXf inputs = model.standardizer().apply(train.mixtures);

  const std::size_t n = train.size();
  const std::size_t batches = (n + options.batch_size - 1) / options.batch_size;
  const CosineSchedule schedule(options.base_lr, options.epochs * batches);
  Adam adam(model.parameter_count());

  SeparatorTrainingResult result;
  TrainState& state = result.state;
  state.best_val_loss = std::numeric_limits<double>::infinity();
  state.best_parameters = model.flat_parameters();
  double last_finite = 0.0;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const auto started = Clock::now();
    const auto order = shuffled(n, derive_seed(options.seed, epoch));
    double epoch_loss = 0.0;
    double lr = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t begin = b * options.batch_size;
      const std::size_t end = std::min(n, begin + options.batch_size);
      const std::span<const std::size_t> cols(order.data() + begin, end - begin);
      const Eigen::MatrixXf x = gather(inputs, cols);
      const Eigen::MatrixXf t1 = gather(train.components[0], cols);
      const Eigen::MatrixXf t2 = gather(train.components[1], cols);

      auto grads = model.zero_gradients();
      const auto pit = model.loss_and_gradients(x, t1, t2, grads, options.permutation_invariant);
      if (!std::isfinite(pit.loss) || pit.loss > options.divergence_threshold) {
        throw DivergenceError("train_separator: loss " + std::to_string(pit.loss) + " at epoch " +
                                  std::to_string(epoch) + ", batch " + std::to_string(b),
                              last_finite);
      }
      last_finite = pit.loss;
      lr = schedule(state.step);
      adam.step({{model.encoder().parameters(), grads.encoder},
                 {model.decoder(0).parameters(), grads.decoder1},
                 {model.decoder(1).parameters(), grads.decoder2}},
                lr);
      ++state.step;
      epoch_loss += pit.loss * static_cast<double>(end - begin);
    }
    state.epoch = epoch + 1;
    EpochLog row;
    row.epoch = epoch + 1;
    row.train_loss = epoch_loss / static_cast<double>(n);
    row.val_loss = evaluate_pit(model, val, 512, options.permutation_invariant);
    row.lr = lr;
    row.wall_ms = elapsed_ms(started);
    if (!std::isfinite(row.val_loss)) {
      throw DivergenceError("train_separator: non-finite validation loss", last_finite);
    }
    if (row.val_loss < state.best_val_loss) {
      state.best_val_loss = row.val_loss;
      state.best_epoch = row.epoch;
      state.best_parameters = model.flat_parameters();
    }
    result.log.push_back(row);
    if (options.on_epoch) options.on_epoch(row);
  }
  model.set_flat_parameters(state.best_parameters);
  result.model = std::move(model);
  return result;
}

SlotDataset separate_slots(const SeparatorModel& frozen, const MixtureDataset& data,
                           std::size_t batch_size) {
  require_pairs(data, "separate_slots");
  const auto n = static_cast<Eigen::Index>(data.size());
  SlotDataset slots;
  slots.inputs.resize(static_cast<Eigen::Index>(data.dim), 2 * n);
  slots.labels.resize(static_cast<std::size_t>(2 * n));
  for (Eigen::Index start = 0; start < n; start += static_cast<Eigen::Index>(batch_size)) {
    const auto width = std::min<Eigen::Index>(static_cast<Eigen::Index>(batch_size), n - start);
    auto [o1, o2] = frozen.forward(data.mixtures.middleCols(start, width));
    const Eigen::MatrixXf t1 = data.components[0].middleCols(start, width);
    const Eigen::MatrixXf t2 = data.components[1].middleCols(start, width);
    const auto pit = pit_loss_batch<float>(o1, o2, t1, t2);
    for (Eigen::Index j = 0; j < width; ++j) {
      const auto s = static_cast<std::size_t>(start + j);
      const bool swap = pit.assignments[static_cast<std::size_t>(j)] == Assignment::swap;
      slots.inputs.col(2 * (start + j)) = o1.col(j);
      slots.inputs.col(2 * (start + j) + 1) = o2.col(j);
      slots.labels[2 * s] = data.labels[s][swap ? 1 : 0];
      slots.labels[2 * s + 1] = data.labels[s][swap ? 0 : 1];
    }
  }
  return slots;
}

std::vector<int> Classifier::predict(const Eigen::MatrixXf& inputs) const {
  std::vector<int> out(static_cast<std::size_t>(inputs.cols()));
  constexpr Eigen::Index kBatch = 1024;
  for (Eigen::Index start = 0; start < inputs.cols(); start += kBatch) {
    const auto width = std::min(kBatch, inputs.cols() - start);
    const Eigen::MatrixXf logits = network.forward(standardizer.apply(inputs.middleCols(start, width)));
    for (Eigen::Index j = 0; j < width; ++j) {
      Eigen::Index best = 0;
      logits.col(j).maxCoeff(&best);
      out[static_cast<std::size_t>(start + j)] = static_cast<int>(best);
    }
  }
  return out;
}

double top1_accuracy(const Classifier& classifier, const SlotDataset& data) {
  if (data.labels.empty()) return 0.0;
  const auto predicted = classifier.predict(data.inputs);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == data.labels[i];
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

ClassifierResult train_classifier(const SlotDataset& train, const SlotDataset& test,
                                  const ClassifierOptions& options) {
  if (train.labels.empty() || test.labels.empty()) {
    throw ParameterError("train_classifier: empty slot dataset");
  }
  if (options.epochs == 0 || options.batch_size == 0 || options.classes < 2) {
    throw ParameterError("train_classifier: invalid options");
  }
  const auto d = static_cast<std::size_t>(train.inputs.rows());
  std::vector<LayerShape> shapes;
  std::size_t width_in = d;
  for (std::size_t i = 0; i < options.hidden_layers; ++i) {
    shapes.push_back({width_in, options.hidden_width});
    width_in = options.hidden_width;
  }
  shapes.push_back({width_in, options.classes});
  std::vector<Activation> acts(shapes.size(), Activation::relu);
  acts.back() = Activation::identity;

  ClassifierResult result;
  Classifier& clf = result.classifier;
  clf.network = DenseNetwork(shapes, acts);
  clf.network.init_he(derive_seed(options.seed, 11));
  clf.standardizer = Standardizer::fit(train.inputs);
  const Eigen::MatrixXf inputs = clf.standardizer.apply(train.inputs);

  const std::size_t n = train.labels.size();
  const std::size_t batches = (n + options.batch_size - 1) / options.batch_size;
  const CosineSchedule schedule(options.base_lr, options.epochs * batches);
  Adam adam(clf.network.parameter_count());
  std::size_t step = 0;
  std::vector<int> batch_labels;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const auto started = Clock::now();
    const auto order = shuffled(n, derive_seed(options.seed, 1000 + epoch));
    double epoch_loss = 0.0;
    double lr = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t begin = b * options.batch_size;
      const std::size_t end = std::min(n, begin + options.batch_size);
      const std::span<const std::size_t> cols(order.data() + begin, end - begin);
      const Eigen::MatrixXf x = gather(inputs, cols);
      batch_labels.clear();
      for (auto c : cols) batch_labels.push_back(train.labels[c]);
      DenseNetwork::Tape tape;
      const Eigen::MatrixXf logits = clf.network.forward(x, tape);
      Eigen::MatrixXf dlogits;
      const double loss = softmax_cross_entropy<float>(logits, batch_labels, &dlogits);
      if (!std::isfinite(loss)) throw DivergenceError("train_classifier: non-finite loss", epoch_loss);
      Eigen::VectorXf grad = Eigen::VectorXf::Zero(static_cast<Eigen::Index>(clf.network.parameter_count()));
      clf.network.backward(tape, dlogits, grad);
      lr = schedule(step++);
      adam.step({{clf.network.parameters(), grad}}, lr);
      epoch_loss += loss * static_cast<double>(end - begin);
    }
    EpochLog row;
    row.epoch = epoch + 1;
    row.train_loss = epoch_loss / static_cast<double>(n);
    row.val_loss = top1_accuracy(clf, test);
    row.lr = lr;
    row.wall_ms = elapsed_ms(started);
    result.log.push_back(row);
  }
  result.top1_accuracy = top1_accuracy(clf, test);
  return result;
}

ClassifierResult train_classifier(const SeparatorModel& frozen, const MixtureDataset& train,
                                  const MixtureDataset& test, const ClassifierOptions& options) {
  return train_classifier(separate_slots(frozen, train), separate_slots(frozen, test), options);
}

}  // namespace csbss
