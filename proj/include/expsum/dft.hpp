#pragma once

// Complex DFT of arbitrary length via Bluestein's chirp-z reduction to a
// power-of-two cyclic convolution. Sign convention: sign = +1 computes
//   X_j = sum_m x_m exp(+2*pi*i*j*m/N),
// sign = -1 the conjugate transform (no 1/N factor either way).
//
// Chirp phases use n^2 mod 2N in exact 64-bit arithmetic, which keeps the
// phase error at a few ulp even for N near 2^26.

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "expsum/summation.hpp"

namespace expsum {
namespace dft {

/// In-place radix-2 Cooley-Tukey; a.size() must be a power of two.
/// sign = -1: forward (e^{-2pi i}), +1: unnormalized inverse.
inline void fft_pow2(std::vector<cdouble>& a, int sign) {
  const std::size_t n = a.size();
  if (n < 2) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / double(len);
    const cdouble wl = std::polar(1.0, ang);
    for (std::size_t i = 0; i < n; i += len) {
      cdouble w{1.0, 0.0};
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cdouble u = a[i + j];
        const cdouble v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

/// Reusable Bluestein machinery for a fixed length. Immutable after
/// construction; execute() is const and safe to share across threads.
class Plan {
 public:
  explicit Plan(std::size_t n) : n_(n) {
    m_ = 1;
    while (m_ < 2 * n_ - 1) m_ <<= 1;
    chirp_.resize(n_);
    const std::uint64_t two_n = 2 * n_;
    for (std::uint64_t i = 0; i < n_; ++i) {
      const std::uint64_t sq = (i * i) % two_n;  // exact: n < 2^26
      chirp_[i] =
          std::polar(1.0, std::numbers::pi * double(sq) / double(n_));
    }
    // FFT of the wrapped conjugate chirp, shared by every execute()
    bfft_.assign(m_, cdouble{});
    bfft_[0] = std::conj(chirp_[0]);
    for (std::size_t i = 1; i < n_; ++i)
      bfft_[i] = bfft_[m_ - i] = std::conj(chirp_[i]);
    fft_pow2(bfft_, -1);
  }

  std::size_t size() const { return n_; }

  /// DFT with exponent sign = +1 or -1.
  std::vector<cdouble> execute(const std::vector<cdouble>& x, int sign) const {
    // jm = (j^2 + m^2 - (j-m)^2) / 2, so with c_n = exp(+i pi n^2 / N):
    //   X_j = c_j * sum_m (x_m c_m) conj(c_{j-m}),
    // a linear convolution evaluated cyclically at padded length M.
    // sign = -1 is conj(DFT_+(conj(x))).
    std::vector<cdouble> a(m_, cdouble{});
    if (sign > 0) {
      for (std::size_t i = 0; i < n_; ++i) a[i] = x[i] * chirp_[i];
    } else {
      for (std::size_t i = 0; i < n_; ++i) a[i] = std::conj(x[i]) * chirp_[i];
    }
    fft_pow2(a, -1);
    for (std::size_t i = 0; i < m_; ++i) a[i] *= bfft_[i];
    fft_pow2(a, +1);
    const double scale = 1.0 / double(m_);
    std::vector<cdouble> out(n_);
    if (sign > 0) {
      for (std::size_t i = 0; i < n_; ++i) out[i] = a[i] * scale * chirp_[i];
    } else {
      for (std::size_t i = 0; i < n_; ++i)
        out[i] = std::conj(a[i] * scale * chirp_[i]);
    }
    return out;
  }

 private:
  std::size_t n_, m_;
  std::vector<cdouble> chirp_;  // exp(+i pi m^2 / N)
  std::vector<cdouble> bfft_;
};

/// One-shot arbitrary-length DFT.
inline std::vector<cdouble> dft_any(const std::vector<cdouble>& x, int sign) {
  if (x.size() <= 1) return x;
  return Plan(x.size()).execute(x, sign);
}

}  // namespace dft
}  // namespace expsum
