#pragma once

// PAPR, empirical CCDF, bit-error accounting and Welch PSD estimation.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pofdma/error.hpp"
#include "pofdma/transforms.hpp"
#include "pofdma/types.hpp"

namespace pofdma {

// 10 log10(max |x|^2 / mean |x|^2).
inline double papr_db(std::span<const Complex> x) {
  if (x.empty()) throw DomainError("PAPR of an empty block");
  double peak = 0.0;
  double total = 0.0;
  for (const auto& v : x) {
    const double p = std::norm(v);
    peak = std::max(peak, p);
    total += p;
  }
  if (total == 0.0) throw DomainError("PAPR of an all-zero block");
  return 10.0 * std::log10(peak * static_cast<double>(x.size()) / total);
}

// Band-limited interpolation of one N-periodic block by an integer factor:
// zero-pad the spectrum between the positive and negative halves.
inline ComplexVector oversample(std::span<const Complex> body, std::size_t factor) {
  if (factor == 0) throw DomainError("oversampling factor must be positive");
  if (factor == 1) return ComplexVector(body.begin(), body.end());
  const std::size_t n = body.size();
  ComplexVector spec = dft(body);
  ComplexVector padded(n * factor);
  const std::size_t half = n / 2;
  std::copy(spec.begin(), spec.begin() + static_cast<std::ptrdiff_t>(half), padded.begin());
  std::copy(spec.begin() + static_cast<std::ptrdiff_t>(half), spec.end(),
            padded.end() - static_cast<std::ptrdiff_t>(n - half));
  idft_in_place(padded);
  return padded;
}

struct PaprSampleSet {
  std::vector<double> samples_db;

  void add(double v) { samples_db.push_back(v); }
  void merge(const PaprSampleSet& other) {
    samples_db.insert(samples_db.end(), other.samples_db.begin(), other.samples_db.end());
  }
  std::size_t size() const noexcept { return samples_db.size(); }
};

// Fraction of samples strictly above each threshold.
inline std::vector<double> ccdf(const PaprSampleSet& set, std::span<const double> thresholds_db) {
  if (set.samples_db.empty()) throw DomainError("CCDF of an empty sample set");
  std::vector<double> sorted = set.samples_db;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(thresholds_db.size());
  const double total = static_cast<double>(sorted.size());
  for (double z : thresholds_db) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), z);
    out.push_back(static_cast<double>(above) / total);
  }
  return out;
}

// Arithmetic mean of the per-block dB values.
inline double average_papr(const PaprSampleSet& set) {
  if (set.samples_db.empty()) throw DomainError("average PAPR of an empty sample set");
  return std::accumulate(set.samples_db.begin(), set.samples_db.end(), 0.0) /
         static_cast<double>(set.samples_db.size());
}

struct BerCounter {
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_total = 0;

  double value() const noexcept {
    return bits_total == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits_total);
  }
  void merge(const BerCounter& other) noexcept {
    bit_errors += other.bit_errors;
    bits_total += other.bits_total;
  }
};

inline BerCounter ber_update(BerCounter counter, std::span<const std::uint8_t> tx_bits,
                             std::span<const std::uint8_t> rx_bits) {
  if (tx_bits.size() != rx_bits.size()) throw DomainError("bit streams differ in length");
  for (std::size_t i = 0; i < tx_bits.size(); ++i) counter.bit_errors += (tx_bits[i] ^ rx_bits[i]) & 1u;
  counter.bits_total += tx_bits.size();
  return counter;
}

inline double ber_value(const BerCounter& counter) noexcept { return counter.value(); }

// Welch estimate in FFT-shifted order: entry j is normalized frequency
// freq_norm[j] in [-0.5, 0.5). power[j] is the mean power per bin, scaled so
// that the bins sum to the mean sample power.
struct PsdEstimate {
  std::size_t segment = 0;
  double overlap = 0.0;
  std::size_t segments_averaged = 0;
  std::string window = "hann";
  std::vector<double> freq_norm;
  std::vector<double> power;

  std::size_t bins() const noexcept { return power.size(); }

  // FFT index (0 = DC) of shifted position j.
  std::size_t fft_index(std::size_t j) const noexcept { return (j + segment / 2) % segment; }
  std::size_t shifted_position(std::size_t fft_idx) const noexcept { return (fft_idx + segment - segment / 2) % segment; }

  double power_db(std::size_t j) const { return 10.0 * std::log10(std::max(power[j], 1e-300)); }
  double total_power() const { return std::accumulate(power.begin(), power.end(), 0.0); }
};

inline std::vector<double> hann_window(std::size_t length) {
  // periodic form: sums to a constant under 50% overlap
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(length));
  }
  return w;
}

inline PsdEstimate welch_psd(std::span<const Complex> samples, std::size_t segment, double overlap = 0.5) {
  if (!is_power_of_two(segment)) throw DomainError("Welch segment must be a power of two");
  if (segment > samples.size()) throw DomainError("Welch segment longer than the input");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw DomainError("Welch overlap must be in [0, 1)");
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                std::llround(static_cast<double>(segment) * (1.0 - overlap))));
  const std::vector<double> w = hann_window(segment);
  const double window_energy = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  const FftPlan& plan = fft_plan(segment);

  std::vector<double> acc(segment, 0.0);
  std::size_t count = 0;
  ComplexVector buf(segment);
  for (std::size_t start = 0; start + segment <= samples.size(); start += hop) {
    for (std::size_t n = 0; n < segment; ++n) buf[n] = samples[start + n] * w[n];
    plan.execute(buf, false);
    for (std::size_t k = 0; k < segment; ++k) acc[k] += std::norm(buf[k]);
    ++count;
  }

  PsdEstimate est;
  est.segment = segment;
  est.overlap = overlap;
  est.segments_averaged = count;
  est.freq_norm.resize(segment);
  est.power.resize(segment);
  const double norm = 1.0 / (static_cast<double>(count) * static_cast<double>(segment) * window_energy);
  for (std::size_t j = 0; j < segment; ++j) {
    const std::size_t k = est.fft_index(j);
    est.power[j] = acc[k] * norm;
    est.freq_norm[j] = (static_cast<double>(j) - static_cast<double>(segment / 2)) / static_cast<double>(segment);
  }
  return est;
}

// FFT indices of local maxima within floor_db of the global maximum.
inline std::vector<std::size_t> spectral_peaks(const PsdEstimate& psd, double floor_db) {
  const std::size_t n = psd.bins();
  std::vector<std::size_t> peaks;
  if (n == 0) return peaks;
  const double top = *std::max_element(psd.power.begin(), psd.power.end());
  const double limit = top * std::pow(10.0, -std::abs(floor_db) / 10.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = psd.power[j];
    const double left = psd.power[(j + n - 1) % n];
    const double right = psd.power[(j + 1) % n];
    if (p >= limit && p >= left && p >= right) peaks.push_back(psd.fft_index(j));
  }
  std::sort(peaks.begin(), peaks.end());
  return peaks;
}

// FFT indices whose power is within floor_db of the global maximum.
inline std::vector<std::size_t> occupied_bins(const PsdEstimate& psd, double floor_db) {
  std::vector<std::size_t> bins;
  if (psd.bins() == 0) return bins;
  const double top = *std::max_element(psd.power.begin(), psd.power.end());
  const double limit = top * std::pow(10.0, -std::abs(floor_db) / 10.0);
  for (std::size_t j = 0; j < psd.bins(); ++j) {
    if (psd.power[j] >= limit) bins.push_back(psd.fft_index(j));
  }
  std::sort(bins.begin(), bins.end());
  return bins;
}

}  // namespace pofdma
