#pragma once

// Per-user recovery from the superposed, CP-stripped received block with
// perfect channel knowledge and zero-forcing single-tap equalization.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "pofdma/channel.hpp"
#include "pofdma/error.hpp"
#include "pofdma/mapping.hpp"
#include "pofdma/transforms.hpp"
#include "pofdma/txchain.hpp"
#include "pofdma/types.hpp"

namespace pofdma {

// Coefficients with smaller magnitude are raised to this floor (phase kept).
inline constexpr double kEqualizerFloor = 1e-12;

enum class PeriodicVariant { Plain, Dct, Dft };

inline PeriodicVariant periodic_variant(Scheme s) {
  switch (s) {
    case Scheme::POfdma: return PeriodicVariant::Plain;
    case Scheme::POfdmaDct: return PeriodicVariant::Dct;
    case Scheme::POfdmaDft: return PeriodicVariant::Dft;
    default: throw DomainError("scheme " + std::string(to_string(s)) + " is not periodic");
  }
}

struct EqualizerTaps {
  ComplexVector coefficients;
  std::size_t clamped = 0;  // coefficients raised to kEqualizerFloor
};

struct RxEstimate {
  std::size_t user = 0;
  ComplexVector symbols;
  BitVector bits;
  std::size_t clamped = 0;
};

inline EqualizerTaps equalizer_taps(const ChannelRealization& chan, std::span<const std::size_t> bins) {
  EqualizerTaps taps;
  taps.coefficients.reserve(bins.size());
  for (std::size_t b : bins) {
    if (b >= chan.freq_response.size()) throw DomainError("equalizer bin outside channel response");
    Complex c = chan.freq_response[b];
    const double mag = std::abs(c);
    if (mag < kEqualizerFloor) {
      c = mag == 0.0 ? Complex(kEqualizerFloor, 0.0) : c * (kEqualizerFloor / mag);
      ++taps.clamped;
    }
    taps.coefficients.push_back(c);
  }
  return taps;
}

namespace detail {

inline void check_rx(std::span<const Complex> received, std::size_t m, const SchemeConfig& cfg,
                     const ChannelRealization& chan) {
  cfg.validate();
  if (m >= cfg.k) throw DomainError("user index " + std::to_string(m) + " >= K");
  if (received.size() != cfg.n) throw DomainError("received block must have N samples after CP removal");
  if (chan.freq_response.size() != cfg.n) throw DomainError("channel response length differs from N");
}

inline RxEstimate finish_rx(ComplexVector symbols, std::size_t m, const SchemeConfig& cfg, std::size_t clamped) {
  RxEstimate est;
  est.user = m;
  est.bits = qam_demodulate(symbols, cfg.order);
  est.symbols = std::move(symbols);
  est.clamped = clamped;
  return est;
}

// Localized receivers share one N-point spectrum across users.
inline RxEstimate localized_rx_from_spectrum(std::span<const Complex> spectrum, std::size_t m,
                                             const SchemeConfig& cfg, const ChannelRealization& chan,
                                             bool despread, OpCounter* ops) {
  const auto bins = subcarrier_support(cfg.scheme, m, cfg.n, cfg.k);
  const EqualizerTaps eq = equalizer_taps(chan, bins);
  ComplexVector z(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) z[i] = spectrum[bins[i]] / eq.coefficients[i];
  if (ops) ops->mult += bins.size();
  if (despread) idft_in_place(z, ops);
  return finish_rx(std::move(z), m, cfg, eq.clamped);
}

}  // namespace detail

// z = F_M A^H X_m^H r; equalize bin i by Lambda[(N - ell + K i) mod N]; then
// undo the precoder (C_M^T or F^H_M) and demap.
inline RxEstimate pofdma_rx(std::span<const Complex> received, std::size_t m, const SchemeConfig& cfg,
                            const ChannelRealization& chan, PeriodicVariant variant, OpCounter* ops = nullptr) {
  detail::check_rx(received, m, cfg, chan);
  const std::size_t mm = cfg.m();
  const PhaseDiagonal x = user_phase_diagonal(user_offset(m, cfg));

  ComplexVector folded(mm);
  for (std::size_t n = 0; n < cfg.n; ++n) folded[n % mm] += std::conj(x.entries[n]) * received[n];
  if (ops) {
    ops->mult += cfg.n;
    ops->add += cfg.n - mm;
  }
  dft_in_place(folded, ops);

  const auto bins = subcarrier_support(Scheme::POfdma, m, cfg.n, cfg.k);
  const EqualizerTaps eq = equalizer_taps(chan, bins);
  for (std::size_t i = 0; i < mm; ++i) folded[i] /= eq.coefficients[i];
  if (ops) ops->mult += mm;

  switch (variant) {
    case PeriodicVariant::Plain: break;
    case PeriodicVariant::Dct: folded = cached_dct_matrix(mm).apply_transpose(folded); break;
    case PeriodicVariant::Dft: idft_in_place(folded, ops); break;
  }
  return detail::finish_rx(std::move(folded), m, cfg, eq.clamped);
}

inline RxEstimate ofdma_rx(std::span<const Complex> received, std::size_t m, const SchemeConfig& cfg,
                           const ChannelRealization& chan, OpCounter* ops = nullptr) {
  detail::check_rx(received, m, cfg, chan);
  const ComplexVector spectrum = dft(received, ops);
  SchemeConfig local = cfg;
  local.scheme = Scheme::Ofdma;
  return detail::localized_rx_from_spectrum(spectrum, m, local, chan, false, ops);
}

inline RxEstimate scfdma_rx(std::span<const Complex> received, std::size_t m, const SchemeConfig& cfg,
                            const ChannelRealization& chan, OpCounter* ops = nullptr) {
  detail::check_rx(received, m, cfg, chan);
  const ComplexVector spectrum = dft(received, ops);
  SchemeConfig local = cfg;
  local.scheme = Scheme::ScFdma;
  return detail::localized_rx_from_spectrum(spectrum, m, local, chan, true, ops);
}

// Recover every user of cfg.scheme from one received block. channels[m] is
// user m's realization. Localized schemes take a single N-point DFT.
inline std::vector<RxEstimate> receive_all(std::span<const Complex> received, const SchemeConfig& cfg,
                                           std::span<const ChannelRealization> channels, OpCounter* ops = nullptr) {
  if (channels.size() != cfg.k) throw DomainError("need one channel realization per user");
  std::vector<RxEstimate> out;
  out.reserve(cfg.k);
  if (is_periodic(cfg.scheme)) {
    const PeriodicVariant v = periodic_variant(cfg.scheme);
    for (std::size_t m = 0; m < cfg.k; ++m) out.push_back(pofdma_rx(received, m, cfg, channels[m], v, ops));
    return out;
  }
  if (received.size() != cfg.n) throw DomainError("received block must have N samples after CP removal");
  const ComplexVector spectrum = dft(received, ops);
  const bool despread = cfg.scheme == Scheme::ScFdma;
  for (std::size_t m = 0; m < cfg.k; ++m) {
    detail::check_rx(received, m, cfg, channels[m]);
    out.push_back(detail::localized_rx_from_spectrum(spectrum, m, cfg, channels[m], despread, ops));
  }
  return out;
}

// Elementwise sum of equal-length signals.
inline ComplexVector superpose(std::span<const ComplexVector> signals) {
  if (signals.empty()) throw DomainError("nothing to superpose");
  ComplexVector sum(signals.front().size());
  for (const auto& s : signals) {
    if (s.size() != sum.size()) throw DomainError("superposed signals differ in length");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += s[i];
  }
  return sum;
}

inline ComplexVector superpose(std::span<const ComplexVector> signals, double snr_db, double signal_power_ref,
                               Rng& rng) {
  return add_awgn(superpose(signals), snr_db, signal_power_ref, rng);
}

}  // namespace pofdma
