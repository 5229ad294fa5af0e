#pragma once

// Counter-keyed random substreams. A substream is identified by the master
// seed and a tuple of integer keys (purpose, block, user, ...); its seed is a
// SplitMix64 hash of that tuple, so no stream depends on how many draws any
// other stream has made.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "pofdma/types.hpp"

namespace pofdma {

using Rng = std::mt19937_64;

enum class Stream : std::uint64_t { Payload = 1, Channel = 2, Noise = 3 };

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
  return h;
}

inline Rng substream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  return Rng(derive_seed(master, keys));
}

// Zero-mean circularly-symmetric complex Gaussian with E|z|^2 = variance.
inline Complex complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s = std::sqrt(variance / 2.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {s * re, s * im};
}

inline BitVector random_bits(Rng& rng, std::size_t count) {
  BitVector bits(count);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0) word = rng();
    bits[i] = static_cast<std::uint8_t>(word & 1u);
    word >>= 1;
  }
  return bits;
}

}  // namespace pofdma
