#include <gtest/gtest.h>

#include <random>
#include <set>

#include "pofdma/mapping.hpp"
#include "pofdma/rng.hpp"

namespace pofdma {
namespace {

BitVector bits_of(unsigned value, unsigned width) {
  BitVector b(width);
  for (unsigned i = 0; i < width; ++i) b[i] = static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1u);
  return b;
}

int hamming(const BitVector& a, const BitVector& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

class ConstellationTest : public ::testing::TestWithParam<int> {};

TEST_P(ConstellationTest, UnitMeanEnergy) {
  const Constellation c(GetParam());
  double total = 0;
  for (const auto& p : c.points()) total += std::norm(p);
  EXPECT_NEAR(total, static_cast<double>(GetParam()), 1e-12);
}

TEST_P(ConstellationTest, LabelingIsBijective) {
  const Constellation c(GetParam());
  const unsigned bps = c.bits_per_symbol();
  std::set<std::pair<double, double>> seen;
  for (unsigned v = 0; v < static_cast<unsigned>(GetParam()); ++v) {
    const auto b = bits_of(v, bps);
    const Complex p = c.map(b);
    seen.insert({p.real(), p.imag()});
    EXPECT_EQ(qam_demodulate(ComplexVector{p}, GetParam()), b);
  }
  EXPECT_EQ(seen.size(), static_cast<std::size_t>(GetParam()));
}

TEST_P(ConstellationTest, AxisNeighboursDifferInOneBit) {
  const Constellation c(GetParam());
  const double step = 2.0 * c.scale();
  for (const auto& p : c.points()) {
    const auto bp = qam_demodulate(ComplexVector{p}, GetParam());
    for (const Complex d : {Complex(step, 0), Complex(0, step)}) {
      const Complex q = p + d;
      if (std::abs(q.real()) > 1.0 + 1e-9 || std::abs(q.imag()) > 1.0 + 1e-9) continue;
      const auto bq = qam_demodulate(ComplexVector{q}, GetParam());
      EXPECT_EQ(hamming(bp, bq), 1);
    }
  }
}

TEST_P(ConstellationTest, RoundTripRandomBits) {
  Rng rng(42);
  const Constellation c(GetParam());
  const BitVector bits = random_bits(rng, 600 * c.bits_per_symbol());
  EXPECT_EQ(qam_demodulate(qam_modulate(bits, GetParam()), GetParam()), bits);
}

TEST_P(ConstellationTest, SmallPerturbationStillDecodes) {
  Rng rng(43);
  const Constellation c(GetParam());
  const BitVector bits = random_bits(rng, 600 * c.bits_per_symbol());
  auto symbols = qam_modulate(bits, GetParam());
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  for (auto& s : symbols) s += Complex(u(rng), u(rng)) * c.scale();
  EXPECT_EQ(qam_demodulate(symbols, GetParam()), bits);
}

INSTANTIATE_TEST_SUITE_P(Orders, ConstellationTest, ::testing::Values(16, 64));

TEST(Constellation, SixtyFourQamGrid) {
  const Constellation c(64);
  std::set<double> levels;
  for (const auto& p : c.points()) {
    levels.insert(std::round(p.real() * std::sqrt(42.0) * 1e6) / 1e6);
    levels.insert(std::round(p.imag() * std::sqrt(42.0) * 1e6) / 1e6);
  }
  EXPECT_EQ(levels, (std::set<double>{-7, -5, -3, -1, 1, 3, 5, 7}));
  EXPECT_EQ(c.points().size(), 64u);
}

TEST(Constellation, SixteenQamScale) { EXPECT_DOUBLE_EQ(Constellation(16).scale(), 1.0 / std::sqrt(10.0)); }

TEST(Constellation, RejectsBadInput) {
  EXPECT_THROW(Constellation(32), DomainError);
  EXPECT_THROW(qam_modulate(BitVector(4), 4), DomainError);
  EXPECT_THROW(qam_modulate(BitVector(5), 16), DomainError);
  EXPECT_THROW(qam_modulate(BitVector(8), 64), DomainError);
}

TEST(Constellation, FarOutsidePointsClampToCorners) {
  const auto b = qam_demodulate(ComplexVector{{100.0, -100.0}}, 16);
  const auto corner = qam_demodulate(ComplexVector{Constellation(16).map(b)}, 16);
  EXPECT_EQ(b, corner);
}

TEST(Constellation, HighSnrBitErrorsRare) {
  Rng rng(44);
  const BitVector bits = random_bits(rng, 400000);
  auto symbols = qam_modulate(bits, 16);
  const double variance = std::pow(10.0, -40.0 / 10.0);
  for (auto& s : symbols) s += complex_gaussian(rng, variance);
  const auto rx = qam_demodulate(symbols, 16);
  EXPECT_LT(static_cast<double>(hamming(bits, rx)) / static_cast<double>(bits.size()), 1e-4);
}

}  // namespace
}  // namespace pofdma
