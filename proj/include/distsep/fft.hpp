// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "distsep/errors.hpp"

namespace distsep {

// Iterative radix-2 FFT with precomputed twiddles and bit-reversal table.
// Transform sizes are restricted to powers of two; every size used by the
// pipeline (512-point analysis frames, overlap-add convolution blocks) is one.
class Fft {
 public:
  explicit Fft(int n) : n_(n) {
    if (n < 2 || !is_pow2(n)) {
      throw ConfigError("Fft: size must be a power of two >= 2, got " +
                        std::to_string(n));
    }
    log2n_ = 0;
    while ((1 << log2n_) < n_) ++log2n_;
    bitrev_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      int r = 0;
      for (int b = 0; b < log2n_; ++b) r |= ((i >> b) & 1) << (log2n_ - 1 - b);
      bitrev_[i] = r;
    }
    tw_.resize(n_ / 2);
    for (int k = 0; k < n_ / 2; ++k) {
      double ang = -2.0 * std::numbers::pi * k / n_;
      tw_[k] = {std::cos(ang), std::sin(ang)};
    }
  }

  int size() const { return n_; }

  static bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

  // In-place forward transform, X[k] = sum_n x[n] e^{-2πi kn/N}.
  void forward(std::complex<double>* x) const {
    for (int i = 0; i < n_; ++i) {
      int j = bitrev_[i];
      if (j > i) std::swap(x[i], x[j]);
    }
    for (int len = 2; len <= n_; len <<= 1) {
      const int half = len >> 1;
      const int stride = n_ / len;
      for (int base = 0; base < n_; base += len) {
        for (int k = 0; k < half; ++k) {
          const std::complex<double> w = tw_[k * stride];
          const std::complex<double> u = x[base + k];
          const std::complex<double> t = w * x[base + k + half];
          x[base + k] = u + t;
          x[base + k + half] = u - t;
        }
      }
    }
  }

  // In-place inverse transform including the 1/N factor.
  void inverse(std::complex<double>* x) const {
    for (int i = 0; i < n_; ++i) x[i] = std::conj(x[i]);
    forward(x);
    const double scale = 1.0 / n_;
    for (int i = 0; i < n_; ++i) x[i] = std::conj(x[i]) * scale;
  }

  // Real input of length N -> one-sided spectrum with N/2+1 bins.
  std::vector<std::complex<double>> rfft(const double* x) const {
    std::vector<std::complex<double>> buf(n_);
    for (int i = 0; i < n_; ++i) buf[i] = {x[i], 0.0};
    forward(buf.data());
    buf.resize(n_ / 2 + 1);
    return buf;
  }

  // One-sided spectrum (N/2+1 bins) -> real signal of length N. The negative
  // frequencies are rebuilt by Hermitian symmetry; any anti-Hermitian residue
  // in the DC/Nyquist bins is discarded by taking the real part.
  void irfft(const std::complex<double>* spec, double* out) const {
    std::vector<std::complex<double>> buf(n_);
    const int half = n_ / 2;
    for (int k = 0; k <= half; ++k) buf[k] = spec[k];
    for (int k = 1; k < half; ++k) buf[n_ - k] = std::conj(spec[k]);
    inverse(buf.data());
    for (int i = 0; i < n_; ++i) out[i] = buf[i].real();
  }

 private:
  int n_;
  int log2n_;
  std::vector<int> bitrev_;
  std::vector<std::complex<double>> tw_;
};

inline int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Linear convolution of x and h via overlap-add, truncated to out_len samples.
// Summation order is fixed, so results are bitwise reproducible.
inline std::vector<double> fft_convolve(const std::vector<double>& x,
                                        const std::vector<double>& h,
                                        std::size_t out_len) {
  std::vector<double> out(out_len, 0.0);
  if (x.empty() || h.empty() || out_len == 0) return out;
  const int lh = static_cast<int>(h.size());
  const int fft_len = next_pow2(std::max(2 * lh, 4096));
  const int block = fft_len - lh + 1;
  Fft fft(fft_len);

  std::vector<std::complex<double>> hf(fft_len, {0.0, 0.0});
  for (int i = 0; i < lh; ++i) hf[i] = {h[i], 0.0};
  fft.forward(hf.data());

  std::vector<std::complex<double>> buf(fft_len);
  for (std::size_t start = 0; start < x.size();
       start += static_cast<std::size_t>(block)) {
    const std::size_t nb =
        std::min<std::size_t>(block, x.size() - start);
    for (std::size_t i = 0; i < nb; ++i) buf[i] = {x[start + i], 0.0};
    for (int i = static_cast<int>(nb); i < fft_len; ++i) buf[i] = {0.0, 0.0};
    fft.forward(buf.data());
    for (int i = 0; i < fft_len; ++i) buf[i] *= hf[i];
    fft.inverse(buf.data());
    const std::size_t limit =
        std::min(out_len, start + static_cast<std::size_t>(fft_len));
    for (std::size_t i = start; i < limit; ++i) {
      out[i] += buf[i - start].real();
    }
  }
  return out;
}

}  // namespace distsep
