#include "csbss/theorem_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "csbss/errors.hpp"
#include "csbss/rng.hpp"

namespace csbss {

std::vector<std::int64_t> fingerprint(const Eigen::VectorXd& v, double grid) {
  std::vector<std::int64_t> key(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    key[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::llround(v(i) / grid));
  }
  return key;
}

std::size_t FingerprintIndex::KeyHash::operator()(
    const std::vector<std::int64_t>& key) const noexcept {
  std::uint64_t h = key.size();
  for (auto v : key) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
  return static_cast<std::size_t>(h);
}

bool FingerprintIndex::insert(const Eigen::VectorXd& key, std::size_t id) {
  auto [it, inserted] = slots_.emplace(fingerprint(key, grid_), keys_.size());
  if (!inserted) return false;
  keys_.push_back(key);
  ids_.push_back(id);
  return true;
}

std::optional<std::size_t> FingerprintIndex::find(const Eigen::VectorXd& query) const {
  auto within = [&](std::size_t slot) {
    const auto& key = keys_[slot];
    return key.size() == query.size() && (key - query).cwiseAbs().maxCoeff() <= tolerance_;
  };
  if (auto it = slots_.find(fingerprint(query, grid_)); it != slots_.end() && within(it->second)) {
    return ids_[it->second];
  }
  for (std::size_t slot = 0; slot < keys_.size(); ++slot) {
    if (within(slot)) return ids_[slot];
  }
  return std::nullopt;
}

LookupOracle::LookupOracle(const std::vector<MixedSample>& ambient_family, double match_tolerance)
    : index_(match_tolerance) {
  if (ambient_family.empty()) throw ParameterError("LookupOracle: empty mixture family");
  k_ = ambient_family.front().k();
  entries_.reserve(ambient_family.size());
  for (std::size_t i = 0; i < ambient_family.size(); ++i) {
    const auto& sample = ambient_family[i];
    if (sample.k() != k_ || sample.component_indices.size() != k_) {
      throw ParameterError("LookupOracle: all mixtures must have k=" + std::to_string(k_));
    }
    if ((mix_all(sample.components) - sample.mixture).cwiseAbs().maxCoeff() > 1e-12) {
      throw ParameterError("LookupOracle: components of mixture " + std::to_string(i) +
                           " do not fold to the stored mixture");
    }
    std::vector<std::size_t> order(k_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return sample.component_indices[a] < sample.component_indices[b];
    });
    Entry entry;
    for (auto j : order) {
      entry.source_indices.push_back(sample.component_indices[j]);
      entry.components.push_back(sample.components[j]);
    }
    if (!index_.insert(sample.mixture, entries_.size())) {
      // Equal fingerprints are only acceptable for the very same source subset.
      const auto existing = index_.find(sample.mixture);
      if (!existing || entries_[*existing].source_indices != entry.source_indices) {
        throw ParameterError("LookupOracle: fingerprint collision at mixture " +
                             std::to_string(i));
      }
      continue;
    }
    entries_.push_back(std::move(entry));
  }
}

std::vector<Eigen::VectorXd> LookupOracle::operator()(const Eigen::VectorXd& mixture) const {
  const auto id = index_.find(mixture);
  if (!id) {
    throw SeparationDomainError("oracle miss: mixture with norm " +
                                std::to_string(mixture.norm()) + " is not in the " +
                                std::to_string(entries_.size()) + "-element domain");
  }
  return entries_[*id].components;
}

LookupReconstruction::LookupReconstruction(const SensingMatrix& phi,
                                           const std::vector<Eigen::VectorXd>& ambient,
                                           double match_tolerance)
    : index_(match_tolerance) {
  for (const auto& x : ambient) {
    if (index_.insert(phi.compress(x), values_.size())) values_.push_back(x);
  }
}

Eigen::VectorXd LookupReconstruction::operator()(const Eigen::VectorXd& y) const {
  const auto id = index_.find(y);
  if (!id) throw SeparationDomainError("perfect reconstruction queried outside its table");
  return values_[*id];
}

std::vector<Eigen::VectorXd> family_domain(const SignalSet& set,
                                           const std::vector<MixedSample>& ambient_family) {
  std::vector<Eigen::VectorXd> domain;
  domain.reserve(set.size() + ambient_family.size());
  for (const auto& s : set.signals) domain.push_back(s);
  for (const auto& m : ambient_family) domain.push_back(m.mixture);
  return domain;
}

PerturbedReconstruction::PerturbedReconstruction(const SensingMatrix& phi, const SignalSet& base,
                                                 const std::vector<MixedSample>& ambient_family,
                                                 double epsilon, std::uint64_t seed, Mode mode)
    : epsilon_(epsilon) {
  if (!(epsilon >= 0.0)) throw ParameterError("PerturbedReconstruction: epsilon must be >= 0");
  base.validate();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto dim = static_cast<Eigen::Index>(base.dim());
  auto random_direction = [&] {
    Eigen::VectorXd u(dim);
    for (auto& v : u) v = normal(rng);
    return Eigen::VectorXd(u / u.norm());
  };
  const Eigen::VectorXd shared = random_direction();

  for (const auto& x : base.signals) {
    Eigen::VectorXd error = mode == Mode::aligned ? Eigen::VectorXd(shared * (epsilon * (1.0 - 1e-9)))
                                                  : Eigen::VectorXd(random_direction() * (epsilon * unit(rng)));
    if (signal_index_.insert(phi.compress(x), signal_outputs_.size())) {
      signal_outputs_.push_back(x + error);
    }
  }
  for (const auto& m : ambient_family) {
    if (mixture_index_.insert(phi.compress(m.mixture), mixture_outputs_.size())) {
      mixture_outputs_.push_back(m.mixture);
    }
  }
  for (const auto& x : base.signals) {
    const double err = (x - (*this)(phi.compress(x))).norm();
    max_signal_error_ = std::max(max_signal_error_, err);
    if (err > epsilon_) {
      throw TheoremViolation("PerturbedReconstruction: error " + std::to_string(err) +
                             " exceeds epsilon " + std::to_string(epsilon_));
    }
  }
}

Eigen::VectorXd PerturbedReconstruction::operator()(const Eigen::VectorXd& y) const {
  if (auto id = signal_index_.find(y)) return signal_outputs_[*id];
  if (auto id = mixture_index_.find(y)) return mixture_outputs_[*id];
  throw SeparationDomainError("perturbed reconstruction queried outside its declared domain");
}

Eigen::VectorXd block_diagonal_apply(const Eigen::MatrixXd& block, const Eigen::VectorXd& stacked,
                                     std::size_t k) {
  if (k == 0 || static_cast<std::size_t>(stacked.size()) != k * static_cast<std::size_t>(block.cols())) {
    throw DimensionError("block_diagonal_apply: stacked length is not k * block columns");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(k) * block.rows());
  for (std::size_t i = 0; i < k; ++i) {
    const auto b = static_cast<Eigen::Index>(i);
    out.segment(b * block.rows(), block.rows()) = block * stacked.segment(b * block.cols(), block.cols());
  }
  return out;
}

Eigen::VectorXd block_diagonal_apply(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& block_map,
    const Eigen::VectorXd& stacked, std::size_t k) {
  std::vector<Eigen::VectorXd> blocks = split_blocks(stacked, k);
  for (auto& b : blocks) b = block_map(b);
  return stack_blocks(blocks);
}

std::vector<Eigen::VectorXd> split_blocks(const Eigen::VectorXd& stacked, std::size_t k) {
  if (k == 0 || stacked.size() % static_cast<Eigen::Index>(k) != 0) {
    throw DimensionError("split_blocks: length not divisible by k");
  }
  const Eigen::Index width = stacked.size() / static_cast<Eigen::Index>(k);
  std::vector<Eigen::VectorXd> blocks;
  for (std::size_t i = 0; i < k; ++i) {
    blocks.emplace_back(stacked.segment(static_cast<Eigen::Index>(i) * width, width));
  }
  return blocks;
}

Eigen::VectorXd stack_blocks(const std::vector<Eigen::VectorXd>& blocks) {
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.size();
  Eigen::VectorXd out(total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.segment(at, b.size()) = b;
    at += b.size();
  }
  return out;
}

CompressedOracle::CompressedOracle(SensingMatrix phi, SeparationOracle oracle,
                                   Reconstructor reconstruct, std::size_t k)
    : phi_(std::move(phi)), oracle_(std::move(oracle)), reconstruct_(std::move(reconstruct)), k_(k) {
  if (k_ == 0) throw ParameterError("CompressedOracle: k must be positive");
}

std::vector<Eigen::VectorXd> CompressedOracle::blocks(const Eigen::VectorXd& y) const {
  return split_blocks((*this)(y), k_);
}

Eigen::VectorXd CompressedOracle::operator()(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd ambient = reconstruct_(y);
  const std::vector<Eigen::VectorXd> components = oracle_(ambient);
  if (components.size() != k_) {
    throw DimensionError("CompressedOracle: oracle returned " + std::to_string(components.size()) +
                         " components, expected " + std::to_string(k_));
  }
  return block_diagonal_apply(phi_.matrix(), stack_blocks(components), k_);
}

CompressedOracle compose_compressed_oracle(const SensingMatrix& phi, const LookupOracle& oracle,
                                           Reconstructor reconstruct) {
  return CompressedOracle(phi, oracle, std::move(reconstruct), oracle.k());
}

SeparationOracle ambient_oracle_from_compressed(const CompressedOracle& compressed,
                                                Reconstructor reconstruct) {
  return [compressed, reconstruct = std::move(reconstruct)](const Eigen::VectorXd& mixture) {
    const Eigen::VectorXd stacked = compressed(compressed.phi().compress(mixture));
    return split_blocks(block_diagonal_apply(reconstruct, stacked, compressed.k()), compressed.k());
  };
}

namespace {

std::vector<std::size_t> ascending_order(const MixedSample& sample) {
  std::vector<std::size_t> order(sample.k());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sample.component_indices[a] < sample.component_indices[b];
  });
  return order;
}

}  // namespace

Theorem1Report verify_theorem1(const CompressedOracle& compressed,
                               const std::vector<MixedSample>& ambient_family, double tolerance) {
  Theorem1Report report;
  const auto& phi = compressed.phi();
  for (std::size_t i = 0; i < ambient_family.size(); ++i) {
    const auto& sample = ambient_family[i];
    std::vector<Eigen::VectorXd> truth;
    for (auto j : ascending_order(sample)) truth.push_back(phi.compress(sample.components[j]));
    double err = 0.0;
    try {
      const Eigen::VectorXd out = compressed(phi.compress(sample.mixture));
      err = (out - stack_blocks(truth)).cwiseAbs().maxCoeff();
    } catch (const SeparationDomainError&) {
      err = std::numeric_limits<double>::infinity();
    }
    report.max_abs_error = std::max(report.max_abs_error, err);
    if (!(err <= tolerance)) report.failures.push_back(i);
    ++report.mixtures;
  }
  return report;
}

BoundReport verify_theorem2(const SensingMatrix& phi, const LookupOracle& oracle,
                            const PerturbedReconstruction& reconstruct,
                            const std::vector<MixedSample>& ambient_mixtures) {
  BoundReport report;
  report.k = oracle.k();
  report.epsilon = reconstruct.epsilon();
  const Reconstructor r = [&reconstruct](const Eigen::VectorXd& y) { return reconstruct(y); };
  const CompressedOracle compressed = compose_compressed_oracle(phi, oracle, r);
  const double rhs = std::sqrt(static_cast<double>(report.k)) * report.epsilon;
  for (std::size_t i = 0; i < ambient_mixtures.size(); ++i) {
    const auto& sample = ambient_mixtures[i];
    if (sample.k() != report.k) throw ParameterError("verify_theorem2: mixture k mismatch");
    std::vector<Eigen::VectorXd> truth;
    for (auto j : ascending_order(sample)) truth.push_back(sample.components[j]);
    const Eigen::VectorXd stacked = compressed(phi.compress(sample.mixture));
    const Eigen::VectorXd recovered = block_diagonal_apply(r, stacked, report.k);
    BoundRow row;
    row.mixture_id = i;
    row.lhs = (recovered - stack_blocks(truth)).norm();
    row.rhs = rhs;
    row.ratio = rhs > 0.0 ? row.lhs / rhs : (row.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    report.max_ratio = std::max(report.max_ratio, row.ratio);
    if (row.lhs > rhs) report.violations.push_back(i);
    report.rows.push_back(row);
  }
  return report;
}

void write_bound_csv(std::ostream& out, const BoundReport& report) {
  out << "mixture_id,lhs,rhs,ratio\n";
  out.precision(17);
  for (const auto& row : report.rows) {
    out << row.mixture_id << ',' << row.lhs << ',' << row.rhs << ',' << row.ratio << '\n';
  }
}

SignalSet make_sparse_signal_set(std::size_t count, std::size_t dim, std::size_t sparsity,
                                 std::uint64_t seed) {
  if (count == 0) throw ParameterError("make_sparse_signal_set: count must be positive");
  Rng rng(seed);
  SignalSet set;
  for (std::size_t i = 0; i < count; ++i) {
    set.signals.push_back(SparseVector::random(dim, sparsity, rng).values());
    set.labels.push_back(static_cast<int>(i));
  }
  return set;
}

}  // namespace csbss
