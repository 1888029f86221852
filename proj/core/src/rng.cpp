#include "csbss/rng.hpp"

namespace csbss {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t counter_bits(std::uint64_t key, std::uint64_t counter) noexcept {
  return splitmix64(splitmix64(key) ^ (counter * 0xD1B54A32D192ED03ULL));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return counter_bits(seed ^ 0x5DEECE66DULL, stream);
}

}  // namespace csbss
