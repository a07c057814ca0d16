// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "seldedge/common.hpp"

namespace seldedge {

inline int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 FFT with a precomputed twiddle table. One instance per
// transform size; reusable across calls.
template <typename T>
class Fft {
 public:
  using cplx = std::complex<T>;

  explicit Fft(int n) : n_(n) {
    if (n < 1 || (n & (n - 1)) != 0) fail(Errc::invalid_argument, "FFT size must be a power of two");
    rev_.resize(n);
    int log2n = 0;
    while ((1 << log2n) < n) ++log2n;
    for (int i = 0; i < n; ++i) {
      unsigned r = 0;
      for (int b = 0; b < log2n; ++b)
        if (i & (1 << b)) r |= 1u << (log2n - 1 - b);
      rev_[i] = static_cast<int>(r);
    }
    tw_.resize(n / 2);
    for (int k = 0; k < n / 2; ++k) {
      double ang = -2.0 * M_PI * k / n;
      tw_[k] = cplx(static_cast<T>(std::cos(ang)), static_cast<T>(std::sin(ang)));
    }
  }

  int size() const { return n_; }

  // In-place forward transform.
  void forward(cplx* a) const { run(a, false); }
  // In-place inverse transform, scaled by 1/n.
  void inverse(cplx* a) const {
    run(a, true);
    T inv = T(1) / static_cast<T>(n_);
    for (int i = 0; i < n_; ++i) a[i] *= inv;
  }

  void forward(std::vector<cplx>& a) const {
    if (static_cast<int>(a.size()) != n_) fail(Errc::invalid_argument, "FFT buffer size mismatch");
    forward(a.data());
  }
  void inverse(std::vector<cplx>& a) const {
    if (static_cast<int>(a.size()) != n_) fail(Errc::invalid_argument, "FFT buffer size mismatch");
    inverse(a.data());
  }

 private:
  void run(cplx* a, bool inv) const {
    for (int i = 0; i < n_; ++i)
      if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
    for (int len = 2; len <= n_; len <<= 1) {
      int half = len >> 1;
      int step = n_ / len;
      for (int i = 0; i < n_; i += len) {
        for (int j = 0; j < half; ++j) {
          cplx w = tw_[j * step];
          if (inv) w = std::conj(w);
          cplx u = a[i + j];
          cplx v = a[i + j + half] * w;
          a[i + j] = u + v;
          a[i + j + half] = u - v;
        }
      }
    }
  }

  int n_;
  std::vector<int> rev_;
  std::vector<cplx> tw_;
};

// Linear convolution of a signal with one kernel (double precision).
// Direct form for short kernels, FFT overlap-free full-length otherwise.
inline std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& h) {
  if (x.empty() || h.empty()) return {};
  const int nx = static_cast<int>(x.size());
  const int nh = static_cast<int>(h.size());
  const int ny = nx + nh - 1;
  if (static_cast<long long>(nx) * nh <= 1 << 18) {
    std::vector<double> y(ny, 0.0);
    for (int i = 0; i < nx; ++i) {
      double xi = x[i];
      for (int j = 0; j < nh; ++j) y[i + j] += xi * h[j];
    }
    return y;
  }
  const int n = next_pow2(ny);
  Fft<double> fft(n);
  std::vector<std::complex<double>> X(n), H(n);
  for (int i = 0; i < nx; ++i) X[i] = x[i];
  for (int i = 0; i < nh; ++i) H[i] = h[i];
  fft.forward(X);
  fft.forward(H);
  for (int i = 0; i < n; ++i) X[i] *= H[i];
  fft.inverse(X);
  std::vector<double> y(ny);
  for (int i = 0; i < ny; ++i) y[i] = X[i].real();
  return y;
}

// Convolve one signal with several kernels of equal length, sharing the
// signal transform (used to spatialize one event through a 4-channel IR).
inline std::vector<std::vector<double>> convolve_many(const std::vector<double>& x,
                                                      const std::vector<std::vector<double>>& hs) {
  std::vector<std::vector<double>> out;
  out.reserve(hs.size());
  if (x.empty() || hs.empty()) return out;
  const int nx = static_cast<int>(x.size());
  int nh = 0;
  for (const auto& h : hs) nh = std::max(nh, static_cast<int>(h.size()));
  const int ny = nx + nh - 1;
  if (static_cast<long long>(nx) * nh <= 1 << 18) {
    for (const auto& h : hs) out.push_back(convolve(x, h));
    return out;
  }
  const int n = next_pow2(ny);
  Fft<double> fft(n);
  std::vector<std::complex<double>> X(n);
  for (int i = 0; i < nx; ++i) X[i] = x[i];
  fft.forward(X);
  std::vector<std::complex<double>> H(n);
  for (const auto& h : hs) {
    std::fill(H.begin(), H.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t i = 0; i < h.size(); ++i) H[i] = h[i];
    fft.forward(H);
    for (int i = 0; i < n; ++i) H[i] *= X[i];
    fft.inverse(H);
    std::vector<double> y(static_cast<std::size_t>(nx) + h.size() - 1);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = H[i].real();
    out.push_back(std::move(y));
  }
  return out;
}

}  // namespace seldedge
