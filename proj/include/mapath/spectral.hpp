#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "mapath/errors.hpp"
#include "mapath/fft.hpp"
#include "mapath/fields.hpp"
#include "mapath/grid.hpp"
#include "mapath/parallel.hpp"

namespace mapath {

using Spectrum = std::vector<Complex>;

/// Fourier differential calculus bound to one grid.
///
/// Every derivative is a diagonal multiplier in frequency space built from the
/// first-order symbols; the Nyquist frequency is zeroed uniformly so that all
/// product/exactness identities (zero mean of ddc entries, discrete
/// integration by parts against closed forms) hold to machine precision.
class SpectralOps {
 public:
  explicit SpectralOps(const TorusGrid& g) : grid_(g), plan_(g.N) {
    kappa_.resize(static_cast<std::size_t>(g.N));
    for (int j = 0; j < g.N; ++j) {
      int f = (j <= g.N / 2) ? j : j - g.N;
      if (j == g.N / 2) f = 0;
      kappa_[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * f;
    }
  }

  const TorusGrid& grid() const { return grid_; }

  /// Angular frequency of mode index j along one axis.
  double kappa(int j) const { return kappa_[static_cast<std::size_t>(j)]; }

  /// Symbol of d/dz_i at per-axis mode indices k: (i kx + ky)/2.
  Complex mu(const std::array<int, 4>& k, int i) const {
    const double kx = kappa(k[static_cast<std::size_t>(2 * i)]);
    const double ky = kappa(k[static_cast<std::size_t>(2 * i + 1)]);
    return {0.5 * ky, 0.5 * kx};
  }

  Spectrum spectrum(const ScalarField& f) const {
    Spectrum s(f.size());
    parallel_for(f.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) s[i] = f.v[i];
    });
    fft_nd(s, grid_, plan_, false);
    return s;
  }

  Spectrum spectrum_complex(const std::vector<Complex>& f) const {
    Spectrum s = f;
    fft_nd(s, grid_, plan_, false);
    return s;
  }

  ScalarField inverse_real(Spectrum s) const {
    fft_nd(s, grid_, plan_, true);
    ScalarField out(grid_);
    parallel_for(s.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) out.v[i] = s[i].real();
    });
    return out;
  }

  std::vector<Complex> inverse_complex(Spectrum s) const {
    fft_nd(s, grid_, plan_, true);
    return s;
  }

  /// Visits every mode: fn(linear index, per-axis mode indices).
  template <class Fn>
  void for_each_mode(Fn&& fn) const {
    const int d = grid_.real_dims();
    const int N = grid_.N;
    std::array<int, 4> k{0, 0, 0, 0};
    const std::size_t total = grid_.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
      fn(idx, k);
      for (int a = d - 1; a >= 0; --a) {
        if (++k[static_cast<std::size_t>(a)] < N) break;
        k[static_cast<std::size_t>(a)] = 0;
      }
    }
  }

  /// Complex Hessian d^2 f / dz_i dzbar_j as a Hermitian matrix field.
  HermitianField ddc(const ScalarField& f) const {
    if (!f.finite()) throw std::invalid_argument("ddc: non-finite input values");
    const Spectrum base = spectrum(f);
    HermitianField out(grid_);
    Spectrum tmp(base.size());
    const int n = grid_.n;
    for (int i = 0; i < n; ++i) {
      for_each_mode([&](std::size_t idx, const std::array<int, 4>& k) {
        const Complex m = mu(k, i);
        tmp[idx] = base[idx] * (-std::norm(m));
      });
      ScalarField di = inverse_real(tmp);
      for (std::size_t p = 0; p < di.size(); ++p) out.diag(p, i) = di[p];
    }
    if (n == 2) {
      for_each_mode([&](std::size_t idx, const std::array<int, 4>& k) {
        tmp[idx] = base[idx] * (-mu(k, 0) * std::conj(mu(k, 1)));
      });
      const std::vector<Complex> off = inverse_complex(std::move(tmp));
      for (std::size_t p = 0; p < off.size(); ++p) out.set(p, 0, 1, off[p]);
    }
    return out;
  }

  /// Holomorphic derivative field d f / dz_i.
  std::vector<Complex> dz(const ScalarField& f, int i) const {
    Spectrum s = spectrum(f);
    for_each_mode([&](std::size_t idx, const std::array<int, 4>& k) { s[idx] *= mu(k, i); });
    return inverse_complex(std::move(s));
  }

  /// d g / dz_k of a complex field given its spectrum.
  std::vector<Complex> dz_complex(const Spectrum& s, int k) const {
    Spectrum t(s.size());
    for_each_mode([&](std::size_t idx, const std::array<int, 4>& km) { t[idx] = s[idx] * mu(km, k); });
    return inverse_complex(std::move(t));
  }

  /// d^2 g / dz_k dzbar_l of a complex field given its spectrum.
  std::vector<Complex> dz_dzbar_complex(const Spectrum& s, int k, int l) const {
    Spectrum t(s.size());
    for_each_mode([&](std::size_t idx, const std::array<int, 4>& km) {
      t[idx] = s[idx] * (-mu(km, k) * std::conj(mu(km, l)));
    });
    return inverse_complex(std::move(t));
  }

  /// Solves tr(C^{-1} ddc h) - h = rhs for constant Hermitian PD C (n x n
  /// entries c); exact in frequency space, used as solver preconditioner.
  ScalarField invert_flat_helmholtz(const ScalarField& rhs, const std::array<std::array<Complex, 2>, 2>& c) const {
    Spectrum s = spectrum(rhs);
    const int n = grid_.n;
    // inverse of the constant matrix
    std::array<std::array<Complex, 2>, 2> w{};
    if (n == 1) {
      w[0][0] = 1.0 / c[0][0];
    } else {
      const Complex det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
      w[0][0] = c[1][1] / det;
      w[1][1] = c[0][0] / det;
      w[0][1] = -c[0][1] / det;
      w[1][0] = -c[1][0] / det;
    }
    for_each_mode([&](std::size_t idx, const std::array<int, 4>& k) {
      // tr(C^{-1} ddc)(k) = -mu^dagger C^{-1} mu  (real, <= 0)
      double lap = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          lap -= (w[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] * mu(k, i) * std::conj(mu(k, j))).real();
      s[idx] /= (lap - 1.0);
    });
    return inverse_real(std::move(s));
  }

 private:
  TorusGrid grid_;
  Fft plan_;
  std::vector<double> kappa_;
};

}  // namespace mapath
