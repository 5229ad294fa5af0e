#pragma once

// Unitary DFT/IDFT on power-of-two lengths, the l-sample shifted IDFT, the
// per-user phase-ramp diagonal and the orthonormal DCT-II.
//
// Sign convention: W_N = exp(-j*2*pi/N). The forward transform uses W_N^{kn},
// the inverse W_N^{-kn}; both carry 1/sqrt(N) so the pair is unitary.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pofdma/error.hpp"
#include "pofdma/types.hpp"

namespace pofdma {

// Iterative radix-2 decimation-in-time FFT with precomputed twiddles and
// bit-reversal permutation. Immutable after construction.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n), log2n_(log2_exact(n)) {
    if (!is_power_of_two(n)) {
      throw DomainError("FFT length " + std::to_string(n) + " is not a power of two");
    }
    bitrev_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t r = 0;
      for (unsigned b = 0; b < log2n_; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n_ - 1 - b);
      }
      bitrev_[i] = r;
    }
    twiddle_.resize(n_ / 2);
    for (std::size_t k = 0; k < n_ / 2; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_);
      twiddle_[k] = Complex(std::cos(angle), std::sin(angle));
    }
  }

  std::size_t size() const noexcept { return n_; }

  // Unnormalized in-place transform. Forward uses W_N^{kn}, inverse W_N^{-kn}.
  void execute(std::span<Complex> data, bool inverse, OpCounter* ops = nullptr) const {
    if (data.size() != n_) throw DomainError("FFT plan/data length mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
    }
    for (std::size_t half = 1; half < n_; half <<= 1) {
      const std::size_t stride = n_ / (2 * half);
      for (std::size_t start = 0; start < n_; start += 2 * half) {
        for (std::size_t j = 0; j < half; ++j) {
          const Complex w = inverse ? std::conj(twiddle_[j * stride]) : twiddle_[j * stride];
          const Complex t = w * data[start + j + half];
          data[start + j + half] = data[start + j] - t;
          data[start + j] += t;
        }
      }
      if (ops) {
        ops->mult += n_ / 2;
        ops->add += n_;
      }
    }
  }

 private:
  std::size_t n_;
  unsigned log2n_;
  std::vector<std::size_t> bitrev_;
  std::vector<Complex> twiddle_;
};

// Shared plan for length n. Plans are created once and never mutated.
inline const FftPlan& fft_plan(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<const FftPlan>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<const FftPlan>(n)).first;
  }
  return *it->second;
}

namespace detail {

inline void unitary_transform(std::span<Complex> data, bool inverse, OpCounter* ops) {
  fft_plan(data.size()).execute(data, inverse, ops);
  const double scale = 1.0 / std::sqrt(static_cast<double>(data.size()));
  for (auto& v : data) v *= scale;
}

}  // namespace detail

inline void dft_in_place(std::span<Complex> data, OpCounter* ops = nullptr) {
  detail::unitary_transform(data, false, ops);
}

inline void idft_in_place(std::span<Complex> data, OpCounter* ops = nullptr) {
  detail::unitary_transform(data, true, ops);
}

inline ComplexVector dft(std::span<const Complex> x, OpCounter* ops = nullptr) {
  ComplexVector out(x.begin(), x.end());
  dft_in_place(out, ops);
  return out;
}

inline ComplexVector idft(std::span<const Complex> x, OpCounter* ops = nullptr) {
  ComplexVector out(x.begin(), x.end());
  idft_in_place(out, ops);
  return out;
}

// y[n] = idft(x)[(n - ell) mod N]: the IDFT delayed circularly by ell samples.
inline ComplexVector shifted_idft(std::span<const Complex> x, std::size_t ell) {
  if (ell >= x.size()) {
    throw DomainError("shift " + std::to_string(ell) + " out of range for length " +
                      std::to_string(x.size()));
  }
  ComplexVector out = idft(x);
  std::rotate(out.begin(), out.end() - static_cast<std::ptrdiff_t>(ell), out.end());
  return out;
}

// Time-domain offset of one user within a K-user periodic allocation.
class UserOffset {
 public:
  UserOffset(std::size_t ell, std::size_t n, std::size_t k) : ell_(ell), n_(n), k_(k) {
    if (k == 0 || n % k != 0) throw DomainError("user count must divide transform size");
    if (ell >= k) throw DomainError("user offset must be below the user count");
  }
  std::size_t ell() const noexcept { return ell_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }

 private:
  std::size_t ell_;
  std::size_t n_;
  std::size_t k_;
};

struct PhaseDiagonal {
  ComplexVector entries;
};

// Diagonal of (1/sqrt(K)) F_{0,N} F^H_{ell,N}: entry k is W_N^{ell*k} / sqrt(K).
inline PhaseDiagonal user_phase_diagonal(const UserOffset& offset) {
  const std::size_t n = offset.n();
  const double scale = 1.0 / std::sqrt(static_cast<double>(offset.k()));
  PhaseDiagonal d;
  d.entries.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // reduce the exponent before forming the angle to keep it small
    const std::size_t e = (offset.ell() * k) % n;
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(n);
    d.entries[k] = scale * Complex(std::cos(angle), std::sin(angle));
  }
  return d;
}

// Dense row-major real matrix; only used for the M-point DCT.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ComplexVector apply(std::span<const Complex> x) const {
    if (x.size() != cols_) throw DomainError("matrix/vector size mismatch");
    ComplexVector y(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      Complex acc{};
      for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
      y[r] = acc;
    }
    return y;
  }

  ComplexVector apply_transpose(std::span<const Complex> x) const {
    if (x.size() != rows_) throw DomainError("matrix/vector size mismatch");
    ComplexVector y(cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) y[c] += (*this)(r, c) * x[r];
    }
    return y;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Orthonormal DCT-II: C[k][n] = a_k cos(pi (2n+1) k / 2M),
// a_0 = sqrt(1/M), a_k = sqrt(2/M) otherwise.
inline RealMatrix dct_matrix(std::size_t m) {
  if (m < 1) throw DomainError("DCT size must be at least 1");
  RealMatrix c(m, m);
  const double md = static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = k == 0 ? std::sqrt(1.0 / md) : std::sqrt(2.0 / md);
    for (std::size_t n = 0; n < m; ++n) {
      c(k, n) = a * std::cos(std::numbers::pi * static_cast<double>((2 * n + 1) * k) / (2.0 * md));
    }
  }
  return c;
}

// Cached per size; the matrices are immutable once built.
inline const RealMatrix& cached_dct_matrix(std::size_t m) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<const RealMatrix>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(m);
  if (it == cache.end()) {
    it = cache.emplace(m, std::make_unique<const RealMatrix>(dct_matrix(m))).first;
  }
  return *it->second;
}

}  // namespace pofdma
