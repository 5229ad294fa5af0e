#pragma once

// Tapped-delay-line Rayleigh channel with an exponential power-delay profile,
// and AWGN injection.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pofdma/error.hpp"
#include "pofdma/rng.hpp"
#include "pofdma/transforms.hpp"
#include "pofdma/types.hpp"

namespace pofdma {

struct ChannelProfile {
  double delay_spread_ns = 300.0;
  double sample_period_ns = 50.0;
  double decay_floor_db = -20.0;  // last tap power relative to the first

  void validate() const {
    if (!(delay_spread_ns >= 0.0)) throw DomainError("delay spread must be non-negative");
    if (!(sample_period_ns > 0.0)) throw DomainError("sample period must be positive");
  }

  std::size_t tap_count() const {
    validate();
    return static_cast<std::size_t>(std::floor(delay_spread_ns / sample_period_ns)) + 1;
  }

  // p_l proportional to exp(-alpha l), p_{L-1}/p_0 = 10^(floor/10), sum 1.
  std::vector<double> tap_powers() const {
    const std::size_t taps = tap_count();
    std::vector<double> p(taps, 1.0);
    if (taps > 1) {
      const double alpha = -std::log(std::pow(10.0, decay_floor_db / 10.0)) / static_cast<double>(taps - 1);
      for (std::size_t l = 0; l < taps; ++l) p[l] = std::exp(-alpha * static_cast<double>(l));
    }
    double total = 0.0;
    for (double v : p) total += v;
    for (double& v : p) v /= total;
    return p;
  }
};

struct ChannelRealization {
  ComplexVector taps;
  ComplexVector freq_response;  // diagonal of Lambda, length N
};

// Unnormalized N-point DFT of the zero-padded taps, so that the circulant
// matrix with first column `taps` equals F^H diag(response) F.
inline ComplexVector freq_response(std::span<const Complex> taps, std::size_t n) {
  if (taps.size() > n) {
    throw DomainError("channel has " + std::to_string(taps.size()) + " taps, more than N=" + std::to_string(n));
  }
  ComplexVector padded(n);
  std::copy(taps.begin(), taps.end(), padded.begin());
  fft_plan(n).execute(padded, false);
  return padded;
}

inline ChannelRealization draw_channel(const ChannelProfile& profile, std::size_t n, Rng& rng) {
  const std::vector<double> powers = profile.tap_powers();
  ChannelRealization chan;
  chan.taps.resize(powers.size());
  for (std::size_t l = 0; l < powers.size(); ++l) chan.taps[l] = complex_gaussian(rng, powers[l]);
  chan.freq_response = freq_response(chan.taps, n);
  return chan;
}

// Linear convolution of the CP-extended block with the taps, truncated to the
// block length. Taps longer than CP+1 leak the block's own tail into its head
// (intra-block ISI); nothing carries over between blocks.
inline ComplexVector apply_channel(std::span<const Complex> block, std::span<const Complex> taps) {
  const std::size_t len = block.size();
  const std::size_t taps_n = taps.size();
  ComplexVector out(len);
  if (len == 0 || taps_n == 0) return out;

  std::size_t fft_len = 1;
  while (fft_len < len + taps_n - 1) fft_len <<= 1;
  const double direct_cost = static_cast<double>(len) * static_cast<double>(taps_n);
  const double fft_cost = 3.0 * static_cast<double>(fft_len) * static_cast<double>(log2_exact(fft_len));

  if (direct_cost <= fft_cost) {
    for (std::size_t n = 0; n < len; ++n) {
      Complex acc{};
      const std::size_t lmax = std::min(taps_n - 1, n);
      for (std::size_t l = 0; l <= lmax; ++l) acc += taps[l] * block[n - l];
      out[n] = acc;
    }
    return out;
  }

  const FftPlan& plan = fft_plan(fft_len);
  ComplexVector a(fft_len), h(fft_len);
  std::copy(block.begin(), block.end(), a.begin());
  std::copy(taps.begin(), taps.end(), h.begin());
  plan.execute(a, false);
  plan.execute(h, false);
  for (std::size_t i = 0; i < fft_len; ++i) a[i] *= h[i];
  plan.execute(a, true);
  const double scale = 1.0 / static_cast<double>(fft_len);
  for (std::size_t n = 0; n < len; ++n) out[n] = a[n] * scale;
  return out;
}

inline ComplexVector apply_channel(std::span<const Complex> block, const ChannelRealization& chan) {
  return apply_channel(block, std::span<const Complex>(chan.taps));
}

// Per-sample noise variance for a target SNR; +inf disables noise.
inline double noise_variance(double snr_db, double signal_power_ref) {
  if (std::isnan(snr_db)) throw DomainError("SNR is NaN");
  if (std::isinf(snr_db)) {
    if (snr_db > 0) return 0.0;
    throw DomainError("SNR of -inf dB");
  }
  return signal_power_ref / std::pow(10.0, snr_db / 10.0);
}

inline ComplexVector add_awgn(std::span<const Complex> samples, double snr_db, double signal_power_ref, Rng& rng) {
  const double variance = noise_variance(snr_db, signal_power_ref);
  ComplexVector out(samples.begin(), samples.end());
  if (variance == 0.0) return out;
  for (auto& v : out) v += complex_gaussian(rng, variance);
  return out;
}

}  // namespace pofdma
