#pragma once

// Transmit chains for the five uplink multiple-access schemes.
//
// Every chain maps M payload symbols of user m to an N-sample body with
// ||body|| = ||symbols||, then prepends a cyclic prefix. The periodic family
// shares the structure body = X_m * A * P(symbols), where A repeats an
// M-vector K times, X_m is the user's phase ramp and P is the per-variant
// M-point precoder/IDFT.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pofdma/error.hpp"
#include "pofdma/transforms.hpp"
#include "pofdma/types.hpp"

namespace pofdma {

enum class Scheme { Ofdma, ScFdma, POfdma, POfdmaDct, POfdmaDft };

inline constexpr std::array<Scheme, 5> kAllSchemes = {Scheme::Ofdma, Scheme::ScFdma, Scheme::POfdma,
                                                     Scheme::POfdmaDct, Scheme::POfdmaDft};

inline constexpr std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::Ofdma: return "OFDMA";
    case Scheme::ScFdma: return "SC-FDMA";
    case Scheme::POfdma: return "P-OFDMA";
    case Scheme::POfdmaDct: return "P-OFDMA-DCT";
    case Scheme::POfdmaDft: return "P-OFDMA-DFT";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  for (Scheme s : kAllSchemes) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

inline constexpr bool is_periodic(Scheme s) noexcept {
  return s == Scheme::POfdma || s == Scheme::POfdmaDct || s == Scheme::POfdmaDft;
}

struct SchemeConfig {
  Scheme scheme = Scheme::POfdma;
  std::size_t n = 256;
  std::size_t k = 64;
  std::size_t cp_len = 64;
  int order = 16;

  std::size_t m() const noexcept { return k == 0 ? 0 : n / k; }

  void validate() const {
    if (!is_power_of_two(n)) throw DomainError("N must be a power of two");
    if (k == 0 || n % k != 0) throw DomainError("K must divide N");
    if (cp_len < 1 || cp_len >= n) throw DomainError("cyclic prefix length must be in [1, N)");
    if (order != 16 && order != 64) throw DomainError("modulation order must be 16 or 64");
  }
};

struct TxBlock {
  std::size_t user = 0;
  std::size_t cp_len = 0;
  ComplexVector samples;  // CP followed by the N-sample body
  ComplexVector payload;

  std::span<const Complex> body() const& { return std::span(samples).subspan(cp_len); }
  ComplexVector body() && { return ComplexVector(samples.begin() + static_cast<std::ptrdiff_t>(cp_len), samples.end()); }
};

// User m is assigned time offset ell_m = m.
inline UserOffset user_offset(std::size_t m, const SchemeConfig& cfg) {
  if (m >= cfg.k) throw DomainError("user index " + std::to_string(m) + " >= K");
  return UserOffset(m, cfg.n, cfg.k);
}

// Subcarriers carrying user m's data, in payload order.
// Localized: mM .. mM+M-1. Periodic: (N - ell + K i) mod N.
inline std::vector<std::size_t> subcarrier_support(Scheme scheme, std::size_t m, std::size_t n,
                                                   std::size_t k) {
  if (k == 0 || n % k != 0) throw DomainError("K must divide N");
  if (m >= k) throw DomainError("user index " + std::to_string(m) + " >= K");
  const std::size_t mm = n / k;
  std::vector<std::size_t> idx(mm);
  for (std::size_t i = 0; i < mm; ++i) {
    idx[i] = is_periodic(scheme) ? (n - m + k * i) % n : m * mm + i;
  }
  return idx;
}

// [s; s; ...; s], K copies.
inline ComplexVector repeat_map(std::span<const Complex> s, std::size_t k) {
  ComplexVector out;
  out.reserve(s.size() * k);
  for (std::size_t r = 0; r < k; ++r) out.insert(out.end(), s.begin(), s.end());
  return out;
}

inline ComplexVector add_cp(std::span<const Complex> body, std::size_t cp_len) {
  if (cp_len >= body.size()) throw DomainError("cyclic prefix must be shorter than the body");
  ComplexVector out;
  out.reserve(body.size() + cp_len);
  out.insert(out.end(), body.end() - static_cast<std::ptrdiff_t>(cp_len), body.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

inline ComplexVector remove_cp(std::span<const Complex> block, std::size_t cp_len) {
  if (cp_len >= block.size()) throw DomainError("cyclic prefix must be shorter than the block");
  return ComplexVector(block.begin() + static_cast<std::ptrdiff_t>(cp_len), block.end());
}

namespace detail {

inline void check_payload(std::span<const Complex> symbols, std::size_t m, const SchemeConfig& cfg) {
  cfg.validate();
  if (m >= cfg.k) throw DomainError("user index " + std::to_string(m) + " >= K");
  if (symbols.size() != cfg.m()) {
    throw DomainError("payload has " + std::to_string(symbols.size()) + " symbols, expected M=" +
                      std::to_string(cfg.m()));
  }
}

inline TxBlock finish(ComplexVector body, std::span<const Complex> symbols, std::size_t m,
                      const SchemeConfig& cfg) {
  TxBlock block;
  block.user = m;
  block.cp_len = cfg.cp_len;
  block.samples = add_cp(body, cfg.cp_len);
  block.payload.assign(symbols.begin(), symbols.end());
  return block;
}

// X_m * A * u for an M-vector u.
inline ComplexVector periodic_spread(std::span<const Complex> u, std::size_t m, const SchemeConfig& cfg,
                                     OpCounter* ops) {
  const PhaseDiagonal x = user_phase_diagonal(user_offset(m, cfg));
  ComplexVector body = repeat_map(u, cfg.k);
  for (std::size_t i = 0; i < body.size(); ++i) body[i] *= x.entries[i];
  if (ops) ops->mult += body.size();
  return body;
}

// Place M frequency-domain values on the contiguous block of user m, then
// N-point IDFT.
inline ComplexVector localized_body(std::span<const Complex> freq, std::size_t m, const SchemeConfig& cfg,
                                    OpCounter* ops) {
  ComplexVector grid(cfg.n);
  std::copy(freq.begin(), freq.end(), grid.begin() + static_cast<std::ptrdiff_t>(m * cfg.m()));
  idft_in_place(grid, ops);
  return grid;
}

}  // namespace detail

inline TxBlock pofdma_tx(std::span<const Complex> symbols, std::size_t m, const SchemeConfig& cfg,
                         OpCounter* ops = nullptr) {
  detail::check_payload(symbols, m, cfg);
  const ComplexVector u = idft(symbols, ops);
  return detail::finish(detail::periodic_spread(u, m, cfg, ops), symbols, m, cfg);
}

inline TxBlock pofdma_dct_tx(std::span<const Complex> symbols, std::size_t m, const SchemeConfig& cfg,
                             OpCounter* ops = nullptr) {
  detail::check_payload(symbols, m, cfg);
  const ComplexVector u = idft(cached_dct_matrix(cfg.m()).apply(symbols), ops);
  return detail::finish(detail::periodic_spread(u, m, cfg, ops), symbols, m, cfg);
}

// DFT precoding cancels the M-point IDFT, leaving X_m * A * symbols.
inline TxBlock pofdma_dft_tx(std::span<const Complex> symbols, std::size_t m, const SchemeConfig& cfg,
                             OpCounter* ops = nullptr) {
  detail::check_payload(symbols, m, cfg);
  return detail::finish(detail::periodic_spread(symbols, m, cfg, ops), symbols, m, cfg);
}

// Unsimplified DFT-precoded path: X_m * A * F^H_M * F_M * symbols.
inline TxBlock pofdma_dft_tx_unsimplified(std::span<const Complex> symbols, std::size_t m,
                                          const SchemeConfig& cfg, OpCounter* ops = nullptr) {
  detail::check_payload(symbols, m, cfg);
  const ComplexVector u = idft(dft(symbols, ops), ops);
  return detail::finish(detail::periodic_spread(u, m, cfg, ops), symbols, m, cfg);
}

inline TxBlock ofdma_tx(std::span<const Complex> symbols, std::size_t m, const SchemeConfig& cfg,
                        OpCounter* ops = nullptr) {
  detail::check_payload(symbols, m, cfg);
  return detail::finish(detail::localized_body(symbols, m, cfg, ops), symbols, m, cfg);
}

// Localized DFT-spread OFDM.
inline TxBlock scfdma_tx(std::span<const Complex> symbols, std::size_t m, const SchemeConfig& cfg,
                         OpCounter* ops = nullptr) {
  detail::check_payload(symbols, m, cfg);
  const ComplexVector spread = dft(symbols, ops);
  return detail::finish(detail::localized_body(spread, m, cfg, ops), symbols, m, cfg);
}

inline TxBlock transmit(std::span<const Complex> symbols, std::size_t m, const SchemeConfig& cfg,
                        OpCounter* ops = nullptr) {
  switch (cfg.scheme) {
    case Scheme::Ofdma: return ofdma_tx(symbols, m, cfg, ops);
    case Scheme::ScFdma: return scfdma_tx(symbols, m, cfg, ops);
    case Scheme::POfdma: return pofdma_tx(symbols, m, cfg, ops);
    case Scheme::POfdmaDct: return pofdma_dct_tx(symbols, m, cfg, ops);
    case Scheme::POfdmaDft: return pofdma_dft_tx(symbols, m, cfg, ops);
  }
  throw DomainError("unknown scheme");
}

}  // namespace pofdma
