#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "mapath/calculus.hpp"
#include "mapath/fields.hpp"
#include "mapath/spectral.hpp"

namespace mapath {

/// Full curvature tensor R_{i jbar k lbar} of a grid metric, n^4 complex
/// components per point.
struct CurvatureField {
  TorusGrid grid;
  std::vector<Complex> comp;

  explicit CurvatureField(const TorusGrid& g)
      : grid(g), comp(g.size() * static_cast<std::size_t>(g.n * g.n * g.n * g.n)) {}

  std::size_t cstride() const { return static_cast<std::size_t>(grid.n * grid.n * grid.n * grid.n); }

  Complex at(std::size_t p, int i, int j, int k, int l) const {
    const int n = grid.n;
    return comp[p * cstride() + static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  Complex& at(std::size_t p, int i, int j, int k, int l) {
    const int n = grid.n;
    return comp[p * cstride() + static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
};

/// R_{i jbar k lbar} = -d^2 g_{i jbar}/dz_k dzbar_l
///                     + g^{p qbar} (d g_{i qbar}/dz_k)(d g_{p jbar}/dzbar_l).
/// g must be positive definite and smooth (band-limited).
inline CurvatureField curvature_tensor(const HermitianField& g, const SpectralOps& ops) {
  const TorusGrid& grid = g.grid;
  const int n = grid.n;
  const std::size_t V = grid.size();
  for (std::size_t p = 0; p < V; ++p)
    if (!g.pos_def_point(p)) throw SingularMetric(p);

  // spectra of the full (unpacked) entries g_{i jbar}
  std::vector<Spectrum> entry_spec(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<Complex> e(V);
      for (std::size_t p = 0; p < V; ++p) e[p] = g.at(p, i, j);
      entry_spec[static_cast<std::size_t>(i * n + j)] = ops.spectrum_complex(e);
    }

  // first derivatives D[k][i][q] = d g_{i qbar} / dz_k
  std::vector<std::vector<Complex>> d1(static_cast<std::size_t>(n * n * n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int q = 0; q < n; ++q)
        d1[static_cast<std::size_t>((k * n + i) * n + q)] =
            ops.dz_complex(entry_spec[static_cast<std::size_t>(i * n + q)], k);
  const auto D1 = [&](int k, int i, int q) -> const std::vector<Complex>& {
    return d1[static_cast<std::size_t>((k * n + i) * n + q)];
  };

  // pointwise inverse metric entries W = g^{-1}
  std::vector<Complex> winv(V * static_cast<std::size_t>(n * n));
  for (std::size_t p = 0; p < V; ++p) {
    Complex* w = &winv[p * static_cast<std::size_t>(n * n)];
    if (n == 1) {
      w[0] = 1.0 / g.diag(p, 0);
    } else {
      const double det = g.det(p);
      const Complex g01 = g.at(p, 0, 1);
      w[0] = g.diag(p, 1) / det;
      w[3] = g.diag(p, 0) / det;
      w[1] = -g01 / det;
      w[2] = -std::conj(g01) / det;
    }
  }

  CurvatureField R(grid);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Spectrum& sij = entry_spec[static_cast<std::size_t>(i * n + j)];
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const std::vector<Complex> sec = ops.dz_dzbar_complex(sij, k, l);
          parallel_for(V, [&](std::size_t b, std::size_t e) {
            for (std::size_t p = b; p < e; ++p) {
              const Complex* w = &winv[p * static_cast<std::size_t>(n * n)];
              Complex term2{0.0, 0.0};
              for (int pp = 0; pp < n; ++pp)
                for (int q = 0; q < n; ++q)
                  term2 += w[q * n + pp] * D1(k, i, q)[p] * std::conj(D1(l, j, pp)[p]);
              R.at(p, i, j, k, l) = -sec[p] + term2;
            }
          });
        }
    }
  return R;
}

/// Holomorphic sectional curvature H(x, xi) = R(xi, xibar, xi, xibar)/|xi|_g^4
/// as a field over the grid; invariant under complex scaling of xi.
inline ScalarField sectional_H(const CurvatureField& R, const HermitianField& g,
                               const std::array<Complex, 2>& xi) {
  const int n = g.grid.n;
  double norm2 = 0;
  for (int i = 0; i < n; ++i) norm2 += std::norm(xi[static_cast<std::size_t>(i)]);
  if (norm2 == 0.0) throw std::invalid_argument("sectional_H: zero direction");

  ScalarField out(g.grid);
  parallel_for(g.grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      Complex num{0.0, 0.0};
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              num += R.at(p, i, j, k, l) * xi[static_cast<std::size_t>(i)] *
                     std::conj(xi[static_cast<std::size_t>(j)]) * xi[static_cast<std::size_t>(k)] *
                     std::conj(xi[static_cast<std::size_t>(l)]);
      Complex len{0.0, 0.0};
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          len += g.at(p, i, j) * xi[static_cast<std::size_t>(i)] * std::conj(xi[static_cast<std::size_t>(j)]);
      const double l2 = len.real();
      out[p] = num.real() / (l2 * l2);
    }
  });
  return out;
}

/// Extrema of H and the constants used by the estimate checks.
struct KappaSummary {
  double sup_H = 0;
  double inf_H = 0;
  double kappa_const = 0;        ///< -sup_H (H <= -kappa_const holds by construction)
  ScalarField kappa_field;       ///< max(0, -sup over directions of H(x, .)) per point
  std::string classification;    ///< negative | quasi-negative | nonpositive | mixed
  int direction_samples = 0;
};

namespace detail {
inline double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}
}  // namespace detail

/// Deterministic direction set on the unit sphere of C^2: coordinate and
/// diagonal directions plus Halton-distributed points (uniform on the
/// projective line).
inline std::vector<std::array<Complex, 2>> direction_set_n2(int samples) {
  std::vector<std::array<Complex, 2>> dirs;
  const double r = 1.0 / std::sqrt(2.0);
  dirs.push_back({Complex{1, 0}, Complex{0, 0}});
  dirs.push_back({Complex{0, 0}, Complex{1, 0}});
  dirs.push_back({Complex{r, 0}, Complex{r, 0}});
  dirs.push_back({Complex{r, 0}, Complex{-r, 0}});
  dirs.push_back({Complex{r, 0}, Complex{0, r}});
  dirs.push_back({Complex{r, 0}, Complex{0, -r}});
  int m = 1;
  while (static_cast<int>(dirs.size()) < samples) {
    const double tau = detail::halton(m, 2);
    const double phi = 2.0 * std::numbers::pi * detail::halton(m, 3);
    const double c = std::sqrt(1.0 - tau), s = std::sqrt(tau);
    dirs.push_back({Complex{c, 0}, s * Complex{std::cos(phi), std::sin(phi)}});
    ++m;
  }
  return dirs;
}

/// Sign classification with a tolerance for the flat boundary case.
inline std::string classify_curvature(double sup_H, double min_point_sup, double tol) {
  if (sup_H < -tol) return "negative";
  if (sup_H <= tol) return (min_point_sup < -tol) ? "quasi-negative" : "nonpositive";
  return "mixed";
}

inline KappaSummary kappa_summary(const HermitianField& g, int samples, const SpectralOps& ops) {
  const int n = g.grid.n;
  if (n == 2 && samples < 32) throw std::invalid_argument("kappa_summary: need samples >= 32 for n=2");
  const CurvatureField R = curvature_tensor(g, ops);

  std::vector<std::array<Complex, 2>> dirs;
  if (n == 1)
    dirs.push_back({Complex{1, 0}, Complex{0, 0}});
  else
    dirs = direction_set_n2(samples);

  const std::size_t V = g.grid.size();
  ScalarField point_sup(g.grid, -std::numeric_limits<double>::infinity());
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  for (const auto& xi : dirs) {
    const ScalarField H = sectional_H(R, g, xi);
    for (std::size_t p = 0; p < V; ++p) {
      point_sup[p] = std::max(point_sup[p], H[p]);
      sup = std::max(sup, H[p]);
      inf = std::min(inf, H[p]);
    }
  }

  KappaSummary out;
  out.sup_H = sup;
  out.inf_H = inf;
  out.kappa_const = -sup;
  out.direction_samples = static_cast<int>(dirs.size());
  out.kappa_field = ScalarField(g.grid);
  double min_point_sup = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < V; ++p) {
    out.kappa_field[p] = std::max(0.0, -point_sup[p]);
    min_point_sup = std::min(min_point_sup, point_sup[p]);
  }
  const double tol = 1e-10 * std::max(1.0, std::max(std::abs(sup), std::abs(inf)));
  out.classification = classify_curvature(sup, min_point_sup, tol);
  return out;
}

}  // namespace mapath
