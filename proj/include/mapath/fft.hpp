#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "mapath/grid.hpp"
#include "mapath/parallel.hpp"

namespace mapath {

/// In-place radix-2 FFT for power-of-two lengths. Forward uses e^{-2pi i kx/N};
/// inverse includes the 1/N factor.
class Fft {
 public:
  explicit Fft(int n) : n_(n) {
    rev_.resize(static_cast<std::size_t>(n));
    int log2n = 0;
    while ((1 << log2n) < n) ++log2n;
    for (int i = 0; i < n; ++i) {
      int r = 0;
      for (int b = 0; b < log2n; ++b)
        if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
      rev_[static_cast<std::size_t>(i)] = r;
    }
    tw_.resize(static_cast<std::size_t>(n / 2));
    for (int j = 0; j < n / 2; ++j) {
      const double ang = -2.0 * std::numbers::pi * j / n;
      tw_[static_cast<std::size_t>(j)] = {std::cos(ang), std::sin(ang)};
    }
  }

  int length() const { return n_; }

  void forward(std::complex<double>* a) const { transform(a, false); }

  void inverse(std::complex<double>* a) const {
    transform(a, true);
    const double s = 1.0 / n_;
    for (int i = 0; i < n_; ++i) a[i] *= s;
  }

 private:
  void transform(std::complex<double>* a, bool inv) const {
    for (int i = 0; i < n_; ++i) {
      const int j = rev_[static_cast<std::size_t>(i)];
      if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n_; len <<= 1) {
      const int half = len >> 1;
      const int step = n_ / len;
      for (int base = 0; base < n_; base += len) {
        for (int j = 0; j < half; ++j) {
          std::complex<double> w = tw_[static_cast<std::size_t>(j * step)];
          if (inv) w = std::conj(w);
          const std::complex<double> u = a[base + j];
          const std::complex<double> v = a[base + j + half] * w;
          a[base + j] = u + v;
          a[base + j + half] = u - v;
        }
      }
    }
  }

  int n_;
  std::vector<int> rev_;
  std::vector<std::complex<double>> tw_;
};

/// Applies the 1D transform along every axis of a row-major N^{2n} array.
inline void fft_nd(std::vector<std::complex<double>>& data, const TorusGrid& grid, const Fft& plan,
                   bool inverse) {
  const int N = grid.N;
  const std::size_t total = grid.size();
  for (int axis = 0; axis < grid.real_dims(); ++axis) {
    const std::size_t s = grid.stride(axis);
    const std::size_t lines = total / static_cast<std::size_t>(N);
    if (s == 1) {
      parallel_for(lines, [&](std::size_t lb, std::size_t le) {
        for (std::size_t line = lb; line < le; ++line) {
          std::complex<double>* p = data.data() + line * static_cast<std::size_t>(N);
          inverse ? plan.inverse(p) : plan.forward(p);
        }
      });
    } else {
      const std::size_t block = s * static_cast<std::size_t>(N);
      parallel_for(lines, [&](std::size_t lb, std::size_t le) {
        std::vector<std::complex<double>> buf(static_cast<std::size_t>(N));
        for (std::size_t line = lb; line < le; ++line) {
          const std::size_t base = (line / s) * block + (line % s);
          for (int t = 0; t < N; ++t) buf[static_cast<std::size_t>(t)] = data[base + static_cast<std::size_t>(t) * s];
          inverse ? plan.inverse(buf.data()) : plan.forward(buf.data());
          for (int t = 0; t < N; ++t) data[base + static_cast<std::size_t>(t) * s] = buf[static_cast<std::size_t>(t)];
        }
      });
    }
  }
}

}  // namespace mapath
