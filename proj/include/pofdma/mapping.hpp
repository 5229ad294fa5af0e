#pragma once

// Square QAM with per-axis reflected Gray labeling and unit mean symbol energy.
//
// Each symbol consumes log2(order) bits, MSB first: the first half selects the
// in-phase level, the second half the quadrature level.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "pofdma/error.hpp"
#include "pofdma/types.hpp"

namespace pofdma {

class Constellation {
 public:
  explicit Constellation(int order) : order_(order) {
    if (order != 16 && order != 64) {
      throw DomainError("unsupported modulation order " + std::to_string(order));
    }
    side_ = order == 16 ? 4 : 8;
    bits_per_axis_ = order == 16 ? 2 : 3;
    // mean |a|^2 over the odd-integer grid is 2(order-1)/3: 10 or 42
    scale_ = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
  }

  int order() const noexcept { return order_; }
  unsigned bits_per_symbol() const noexcept { return 2 * bits_per_axis_; }
  double scale() const noexcept { return scale_; }

  // Level index along one axis -> amplitude.
  double amplitude(unsigned index) const noexcept {
    return scale_ * (2.0 * static_cast<double>(index) - static_cast<double>(side_ - 1));
  }

  // Gray label of an axis index and its inverse.
  static unsigned gray(unsigned index) noexcept { return index ^ (index >> 1); }
  static unsigned gray_inverse(unsigned label) noexcept {
    unsigned index = label;
    for (unsigned shift = 1; shift < 8; shift <<= 1) index ^= index >> shift;
    return index;
  }

  Complex map(std::span<const std::uint8_t> bits) const {
    const unsigned i_label = read_label(bits.first(bits_per_axis_));
    const unsigned q_label = read_label(bits.subspan(bits_per_axis_, bits_per_axis_));
    return {amplitude(gray_inverse(i_label)), amplitude(gray_inverse(q_label))};
  }

  // Nearest point: per-axis rounding is the minimum-distance decision on a
  // square grid.
  void demap(Complex y, std::span<std::uint8_t> out) const {
    write_label(gray(decide(y.real())), out.first(bits_per_axis_));
    write_label(gray(decide(y.imag())), out.subspan(bits_per_axis_, bits_per_axis_));
  }

  ComplexVector points() const {
    ComplexVector pts;
    pts.reserve(static_cast<std::size_t>(order_));
    for (unsigned i = 0; i < side_; ++i) {
      for (unsigned q = 0; q < side_; ++q) pts.emplace_back(amplitude(i), amplitude(q));
    }
    return pts;
  }

 private:
  unsigned decide(double v) const noexcept {
    const double idx = std::round((v / scale_ + static_cast<double>(side_ - 1)) / 2.0);
    return static_cast<unsigned>(std::clamp(idx, 0.0, static_cast<double>(side_ - 1)));
  }

  static unsigned read_label(std::span<const std::uint8_t> bits) noexcept {
    unsigned label = 0;
    for (auto b : bits) label = (label << 1) | (b & 1u);
    return label;
  }

  static void write_label(unsigned label, std::span<std::uint8_t> out) noexcept {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = static_cast<std::uint8_t>((label >> (out.size() - 1 - i)) & 1u);
    }
  }

  int order_;
  unsigned side_;
  unsigned bits_per_axis_;
  double scale_;
};

inline ComplexVector qam_modulate(std::span<const std::uint8_t> bits, int order) {
  const Constellation c(order);
  const std::size_t bps = c.bits_per_symbol();
  if (bits.size() % bps != 0) {
    throw DomainError("bit count " + std::to_string(bits.size()) + " is not a multiple of " +
                      std::to_string(bps));
  }
  ComplexVector symbols(bits.size() / bps);
  for (std::size_t i = 0; i < symbols.size(); ++i) symbols[i] = c.map(bits.subspan(i * bps, bps));
  return symbols;
}

inline BitVector qam_demodulate(std::span<const Complex> symbols, int order) {
  const Constellation c(order);
  const std::size_t bps = c.bits_per_symbol();
  BitVector bits(symbols.size() * bps);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    c.demap(symbols[i], std::span(bits).subspan(i * bps, bps));
  }
  return bits;
}

}  // namespace pofdma
