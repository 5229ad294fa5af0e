#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace pofdma {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;
using BitVector = std::vector<std::uint8_t>;

// Tally of complex multiplications and additions actually executed by a
// transmit or receive path. Only butterflies and diagonal scalings are
// counted; unitary 1/sqrt(N) normalization is treated as free, as in the
// closed-form complexity tables.
struct OpCounter {
  std::uint64_t mult = 0;
  std::uint64_t add = 0;
};

inline constexpr bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

inline constexpr unsigned log2_exact(std::size_t n) noexcept {
  unsigned r = 0;
  while (n > 1) {
    n >>= 1;
    ++r;
  }
  return r;
}

}  // namespace pofdma
