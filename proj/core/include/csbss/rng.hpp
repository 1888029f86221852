#pragma once

#include <cstdint>
#include <random>

namespace csbss {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based generator: a pure function of (key, counter).
std::uint64_t counter_bits(std::uint64_t key, std::uint64_t counter) noexcept;

/// Derives an independent seed for a named sub-stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace csbss
