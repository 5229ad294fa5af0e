#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <sstream>

#include "pofdma/complexity.hpp"
#include "reference_counts.hpp"

namespace pofdma {
namespace {

TEST(OpCounts, KnownCells) {
  EXPECT_EQ(op_counts(Scheme::POfdma, 256, 64).tx_mult, 260u);
  EXPECT_EQ(op_counts(Scheme::POfdma, 256, 64).rx_mult, 16896u);
  EXPECT_EQ(op_counts(Scheme::ScFdma, 256, 64).tx_mult, 1028u);
  EXPECT_EQ(op_counts(Scheme::POfdmaDct, 256, 64).tx_mult, 264u);
  EXPECT_EQ(op_counts(Scheme::Ofdma, 128, 8).tx_mult, 448u);
  EXPECT_EQ(op_counts(Scheme::POfdma, 128, 8).tx_mult, 160u);
  EXPECT_EQ(op_counts(Scheme::POfdmaDft, 128, 8).rx_mult, 1664u);
  EXPECT_EQ(op_counts(Scheme::POfdma, 512, 512).tx_mult, 512u);
}

// The formula value; the reference table lists 9728 here (Tx/Rx swapped).
TEST(OpCounts, ScFdmaLargeRowFollowsFormula) {
  const auto r = op_counts(Scheme::ScFdma, 1024, 8);
  EXPECT_EQ(r.tx_mult, 5568u);
  EXPECT_EQ(r.rx_mult, 9728u);
}

TEST(OpCounts, DftVariantTransmitterIsNMultiplicationsNoAdditions) {
  for (std::uint64_t n : {16u, 128u, 1024u})
    for (std::uint64_t k = 1; k <= n; k *= 2) {
      const auto r = op_counts(Scheme::POfdmaDft, n, k);
      EXPECT_EQ(r.tx_mult, n);
      EXPECT_EQ(r.tx_add, 0u);
    }
}

TEST(OpCounts, TotalsAreKTxPlusRx) {
  for (const auto& r : complexity_table(reference_table_rows())) {
    EXPECT_EQ(r.tot_mult, r.k * r.tx_mult + r.rx_mult);
    EXPECT_EQ(r.tot_add, r.k * r.tx_add + r.rx_add);
    EXPECT_EQ(r.m, r.n / r.k);
  }
}

TEST(OpCounts, DftVariantHasSmallestTransmitter) {
  for (const auto& [n, k] : reference_table_rows()) {
    const auto dft = op_counts(Scheme::POfdmaDft, n, k).tx_mult;
    for (Scheme s : kAllSchemes) EXPECT_LE(dft, op_counts(s, n, k).tx_mult);
  }
}

TEST(OpCounts, RejectsInvalidDimensions) {
  EXPECT_THROW(op_counts(Scheme::Ofdma, 256, 48), DomainError);
  EXPECT_THROW(op_counts(Scheme::Ofdma, 192, 3), DomainError);
  EXPECT_THROW(op_counts(Scheme::Ofdma, 256, 0), DomainError);
  EXPECT_THROW(total_counts(Scheme::ScFdma, 256, 4), DomainError);
}

TEST(TotalCounts, PublishedValues) {
  EXPECT_EQ(total_counts(Scheme::Ofdma, 1024, 16), (std::pair<std::uint64_t, std::uint64_t>{333824, 665600}));
  EXPECT_EQ(total_counts(Scheme::POfdma, 1024, 16), (std::pair<std::uint64_t, std::uint64_t>{136192, 8192}));
}

TEST(TotalCounts, SingleUserOfdma) {
  for (std::uint64_t n = 2; n <= 4096; n *= 2) {
    const std::uint64_t log_n = std::bit_width(n) - 1;
    EXPECT_EQ(total_counts(Scheme::Ofdma, n, n).first, n * log_n + n);
  }
}

TEST(TotalCounts, ClosedFormsMatchAggregationExhaustively) {
  for (std::uint64_t n = 1; n <= 4096; n *= 2)
    for (std::uint64_t m = 1; m <= n; m *= 2)
      for (Scheme s : {Scheme::Ofdma, Scheme::POfdma}) {
        const auto agg = op_counts(s, n, n / m);
        const auto [tm, ta] = total_counts(s, n, m);
        EXPECT_EQ(tm, agg.tot_mult) << n << "," << m;
        EXPECT_EQ(ta, agg.tot_add) << n << "," << m;
      }
}

TEST(ComplexityTable, MatchesReferenceExceptTransposedCells) {
  // Twelve SC-FDMA cells of the reference table have Tx and Rx interchanged.
  std::size_t mismatches = 0, swapped = 0;
  for (const auto& row : kReferenceMultiplications) {
    for (std::size_t s = 0; s < kAllSchemes.size(); ++s) {
      const auto r = op_counts(kAllSchemes[s], row[0], row[1]);
      const bool tx_ok = r.tx_mult == row[3 + 2 * s], rx_ok = r.rx_mult == row[4 + 2 * s];
      mismatches += !tx_ok + !rx_ok;
      if (!tx_ok && r.tx_mult == row[4 + 2 * s] && r.rx_mult == row[3 + 2 * s]) swapped += 2;
    }
  }
  EXPECT_EQ(mismatches, 12u);
  EXPECT_EQ(swapped, 12u);
}

TEST(ComplexityCsv, HeaderAndRowCount) {
  std::ostringstream os;
  write_complexity_csv(os, complexity_table(reference_table_rows()));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "scheme,N,K,M,tx_mult,tx_add,rx_mult,rx_add,tot_mult,tot_add");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 21u * 5u);
  std::istringstream again(os.str());
  std::getline(again, line);
  std::getline(again, line);
  EXPECT_EQ(line, "OFDMA,128,8,16,448,896,576,896,4160,8064");
}

TEST(ComplexityText, ContainsEveryRow) {
  const auto text = format_multiplication_table(reference_table_rows());
  EXPECT_NE(text.find("P-OFDMA-DFT Tx"), std::string::npos);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), 22u);
}

}  // namespace
}  // namespace pofdma
