#pragma once

// Closed-form complex-operation counts for a radix-2 FFT implementation.
// Transmitter counts are per user; receiver counts are the base-station total
// for all K users; totals are K * tx + rx.

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pofdma/error.hpp"
#include "pofdma/txchain.hpp"
#include "pofdma/types.hpp"

namespace pofdma {

struct ComplexityReport {
  Scheme scheme = Scheme::Ofdma;
  std::uint64_t n = 0, k = 0, m = 0;
  std::uint64_t tx_mult = 0, tx_add = 0;
  std::uint64_t rx_mult = 0, rx_add = 0;
  std::uint64_t tot_mult = 0, tot_add = 0;
};

namespace detail {

inline void check_dimensions(std::uint64_t n, std::uint64_t k) {
  if (!is_power_of_two(n)) throw DomainError("N must be a power of two");
  if (k == 0 || n % k != 0) throw DomainError("K must divide N");
  if (!is_power_of_two(n / k)) throw DomainError("M = N/K must be a power of two");
}

}  // namespace detail

inline ComplexityReport op_counts(Scheme scheme, std::uint64_t n, std::uint64_t k) {
  detail::check_dimensions(n, k);
  const std::uint64_t m = n / k;
  const std::uint64_t log_n = log2_exact(n);
  const std::uint64_t log_m = log2_exact(m);
  // radix-2 FFT of size L: L/2 log2 L multiplications, L log2 L additions
  const std::uint64_t fft_n_mult = n / 2 * log_n, fft_n_add = n * log_n;
  const std::uint64_t fft_m_mult = m * log_m / 2, fft_m_add = m * log_m;

  ComplexityReport r;
  r.scheme = scheme;
  r.n = n;
  r.k = k;
  r.m = m;
  switch (scheme) {
    case Scheme::Ofdma:
      r.tx_mult = fft_n_mult;
      r.tx_add = fft_n_add;
      r.rx_mult = fft_n_mult + n;
      r.rx_add = fft_n_add;
      break;
    case Scheme::ScFdma:
      r.tx_mult = fft_n_mult + fft_m_mult;
      r.tx_add = fft_n_add + fft_m_add;
      r.rx_mult = fft_n_mult + k * (fft_m_mult + m);
      r.rx_add = fft_n_add + k * fft_m_add;
      break;
    case Scheme::POfdma:
      r.tx_mult = fft_m_mult + n;
      r.tx_add = fft_m_add;
      r.rx_mult = k * (n + fft_m_mult + m);
      r.rx_add = k * fft_m_add;
      break;
    case Scheme::POfdmaDct:
      r.tx_mult = 2 * fft_m_mult + n;
      r.tx_add = 2 * fft_m_add;
      r.rx_mult = k * (n + 2 * fft_m_mult + m);
      r.rx_add = k * 2 * fft_m_add;
      break;
    case Scheme::POfdmaDft:
      r.tx_mult = n;
      r.tx_add = 0;
      r.rx_mult = k * (n + 2 * fft_m_mult + m);
      r.rx_add = k * 2 * fft_m_add;
      break;
  }
  r.tot_mult = k * r.tx_mult + r.rx_mult;
  r.tot_add = k * r.tx_add + r.rx_add;
  return r;
}

// Totals as functions of (N, M) after substituting K = N/M. Only OFDMA and
// P-OFDMA have published closed forms.
inline std::pair<std::uint64_t, std::uint64_t> total_counts(Scheme scheme, std::uint64_t n, std::uint64_t m) {
  if (m == 0 || n % m != 0) throw DomainError("M must divide N");
  detail::check_dimensions(n, n / m);
  const std::uint64_t log_n = log2_exact(n);
  const std::uint64_t log_m = log2_exact(m);
  switch (scheme) {
    case Scheme::Ofdma:
      return {(n / m + 1) * n / 2 * log_n + n, (n / m + 1) * n * log_n};
    case Scheme::POfdma:
      return {n * log_m + 2 * n * n / m + n, 2 * n * log_m};
    default:
      throw DomainError("no closed-form total for " + std::string(to_string(scheme)));
  }
}

// (N, K) rows of the published multiplication-count comparison.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> reference_table_rows() {
  return {{128, 8},   {128, 32},  {128, 64},  {128, 128}, {256, 8},   {256, 32},  {256, 64},
          {256, 128}, {256, 256}, {512, 8},   {512, 32},  {512, 64},  {512, 128}, {512, 256},
          {512, 512}, {1024, 8},  {1024, 32}, {1024, 64}, {1024, 128}, {1024, 256}, {1024, 512}};
}

inline std::vector<ComplexityReport> complexity_table(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& rows) {
  std::vector<ComplexityReport> out;
  out.reserve(rows.size() * kAllSchemes.size());
  for (const auto& [n, k] : rows) {
    for (Scheme s : kAllSchemes) out.push_back(op_counts(s, n, k));
  }
  return out;
}

inline void write_complexity_csv(std::ostream& os, const std::vector<ComplexityReport>& rows) {
  os << "scheme,N,K,M,tx_mult,tx_add,rx_mult,rx_add,tot_mult,tot_add\n";
  for (const auto& r : rows) {
    os << to_string(r.scheme) << ',' << r.n << ',' << r.k << ',' << r.m << ',' << r.tx_mult << ',' << r.tx_add
       << ',' << r.rx_mult << ',' << r.rx_add << ',' << r.tot_mult << ',' << r.tot_add << '\n';
  }
}

// Multiplication-only comparison: one line per (N, K), Tx/Rx per scheme.
inline std::string format_multiplication_table(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& rows) {
  std::ostringstream os;
  os << std::setw(6) << "N" << std::setw(6) << "K" << std::setw(6) << "M";
  for (Scheme s : kAllSchemes) {
    const std::string name(to_string(s));
    os << std::setw(15) << (name + " Tx") << std::setw(15) << "Rx";
  }
  os << '\n';
  for (const auto& [n, k] : rows) {
    os << std::setw(6) << n << std::setw(6) << k << std::setw(6) << n / k;
    for (Scheme s : kAllSchemes) {
      const auto r = op_counts(s, n, k);
      os << std::setw(15) << r.tx_mult << std::setw(15) << r.rx_mult;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace pofdma
