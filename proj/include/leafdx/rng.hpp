#pragma once

#include <cstdint>

namespace leafdx {

// splitmix64 finalizer; good single-pass bit mixer for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent sub-seed for unit `index` (sample, image, binary classifier)
/// derived from a master seed. Order-independent, so parallel workers using
/// their own index produce the same stream as a sequential run.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

}  // namespace leafdx
