#include <benchmark/benchmark.h>

#include <random>

#include "csbss/losses.hpp"
#include "csbss/sensing.hpp"
#include "csbss/separator.hpp"
#include "csbss/sparse_recovery.hpp"

namespace {

using namespace csbss;

Eigen::MatrixXf random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  Eigen::MatrixXf m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

void BM_Compress(benchmark::State& state) {
  const double rate = static_cast<double>(state.range(0)) / 100.0;
  const auto phi = SensingMatrix::generate(7, 784, rate);
  const Eigen::MatrixXd x = random_matrix(784, 128, 1).cast<double>();
  for (auto _ : state) benchmark::DoNotOptimize(phi.compress_columns(x));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_Compress)->Arg(25)->Arg(50);

void BM_OmpRecovery(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto phi = SensingMatrix::generate(4, 256, 0.25);
  Rng rng(11);
  const auto x = SparseVector::random(256, k, rng);
  const Eigen::VectorXd y = phi.compress(x.values());
  for (auto _ : state) benchmark::DoNotOptimize(omp_reconstruct(phi, y, k));
}
BENCHMARK(BM_OmpRecovery)->DenseRange(1, 6);

SeparatorModel bench_model(std::size_t d) { return make_separator({d, 64, 400000, 3, 2}, 5); }

void BM_SeparatorForward(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto model = bench_model(d);
  const Eigen::MatrixXf x = random_matrix(static_cast<Eigen::Index>(d), 128, 2);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_SeparatorForward)->Arg(196)->Arg(392)->Arg(784);

void BM_SeparatorBackward(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto model = bench_model(d);
  const auto rows = static_cast<Eigen::Index>(d);
  const Eigen::MatrixXf x = random_matrix(rows, 128, 2);
  const Eigen::MatrixXf t1 = random_matrix(rows, 128, 3);
  const Eigen::MatrixXf t2 = random_matrix(rows, 128, 4);
  auto grads = model.zero_gradients();
  for (auto _ : state) benchmark::DoNotOptimize(model.loss_and_gradients(x, t1, t2, grads));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_SeparatorBackward)->Arg(196)->Arg(392)->Arg(784);

void BM_PitLoss(benchmark::State& state) {
  const Eigen::MatrixXf o1 = random_matrix(392, 128, 5), o2 = random_matrix(392, 128, 6);
  const Eigen::MatrixXf t1 = random_matrix(392, 128, 7), t2 = random_matrix(392, 128, 8);
  for (auto _ : state) benchmark::DoNotOptimize(pit_loss_batch<float>(o1, o2, t1, t2));
  state.SetItemsProcessed(state.iterations() * o1.cols());
}
BENCHMARK(BM_PitLoss);

}  // namespace

BENCHMARK_MAIN();
