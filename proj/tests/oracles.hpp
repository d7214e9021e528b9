// Independent reference implementations used only by tests: a naive DFT, 4th
// order centered finite differences on the periodic grid, dense Gaussian
// elimination, and a dense Newton iteration with a finite-difference Jacobian.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "mapath/fields.hpp"
#include "mapath/grid.hpp"

namespace oracle {

using mapath::Complex;
using mapath::HermitianField;
using mapath::ScalarField;
using mapath::TorusGrid;

/// O(N^2) reference DFT of one line.
inline std::vector<Complex> naive_dft(const std::vector<Complex>& in, bool inverse) {
  const std::size_t n = in.size();
  std::vector<Complex> out(n, Complex{0, 0});
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t x = 0; x < n; ++x) {
      const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k * x % n) / static_cast<double>(n);
      out[k] += in[x] * Complex{std::cos(ang), std::sin(ang)};
    }
    if (inverse) out[k] /= static_cast<double>(n);
  }
  return out;
}

/// Shifts a point by `off` steps along `axis` (periodic).
inline std::size_t shift(const TorusGrid& g, std::size_t p, int axis, int off) {
  auto c = g.coords(p);
  int& v = c[static_cast<std::size_t>(axis)];
  v = ((v + off) % g.N + g.N) % g.N;
  return g.index(c);
}

/// 4th order centered first derivative along a real axis.
inline ScalarField fd4_d1(const ScalarField& f, int axis) {
  const TorusGrid& g = f.grid;
  const double h = g.spacing();
  ScalarField out(g);
  for (std::size_t p = 0; p < f.size(); ++p) {
    const double fm2 = f[shift(g, p, axis, -2)], fm1 = f[shift(g, p, axis, -1)];
    const double fp1 = f[shift(g, p, axis, 1)], fp2 = f[shift(g, p, axis, 2)];
    out[p] = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
  }
  return out;
}

/// 4th order centered second derivative along a real axis.
inline ScalarField fd4_d2(const ScalarField& f, int axis) {
  const TorusGrid& g = f.grid;
  const double h = g.spacing();
  ScalarField out(g);
  for (std::size_t p = 0; p < f.size(); ++p) {
    const double fm2 = f[shift(g, p, axis, -2)], fm1 = f[shift(g, p, axis, -1)];
    const double f0 = f[p];
    const double fp1 = f[shift(g, p, axis, 1)], fp2 = f[shift(g, p, axis, 2)];
    out[p] = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
  }
  return out;
}

/// Mixed partial via composed first derivatives (axes may coincide).
inline ScalarField fd4_mixed(const ScalarField& f, int a, int b) {
  if (a == b) return fd4_d2(f, a);
  return fd4_d1(fd4_d1(f, b), a);
}

/// Finite-difference complex Hessian, entries (d_xi d_xj + d_yi d_yj
/// + i d_xi d_yj - i d_yi d_xj) f / 4.
inline HermitianField fd4_ddc(const ScalarField& f) {
  const TorusGrid& g = f.grid;
  HermitianField out(g);
  for (int i = 0; i < g.n; ++i) {
    ScalarField d = fd4_d2(f, 2 * i) + fd4_d2(f, 2 * i + 1);
    for (std::size_t p = 0; p < f.size(); ++p) out.diag(p, i) = 0.25 * d[p];
  }
  if (g.n == 2) {
    const ScalarField xx = fd4_mixed(f, 0, 2), yy = fd4_mixed(f, 1, 3);
    const ScalarField xy = fd4_mixed(f, 0, 3), yx = fd4_mixed(f, 1, 2);
    for (std::size_t p = 0; p < f.size(); ++p)
      out.set(p, 0, 1, 0.25 * Complex{xx[p] + yy[p], xy[p] - yx[p]});
  }
  return out;
}

/// FD4 holomorphic derivative (f_x - i f_y)/2 along complex direction i.
inline std::vector<Complex> fd4_dz(const ScalarField& f, int i) {
  const ScalarField fx = fd4_d1(f, 2 * i), fy = fd4_d1(f, 2 * i + 1);
  std::vector<Complex> out(f.size());
  for (std::size_t p = 0; p < f.size(); ++p) out[p] = 0.5 * Complex{fx[p], -fy[p]};
  return out;
}

/// Dense Gaussian elimination with partial pivoting; A is row-major m x m.
inline std::vector<double> dense_solve(std::vector<double> A, std::vector<double> b) {
  const std::size_t m = b.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(A[r * m + col]) > std::abs(A[piv * m + col])) piv = r;
    if (piv != col) {
      for (std::size_t c = 0; c < m; ++c) std::swap(A[col * m + c], A[piv * m + c]);
      std::swap(b[col], b[piv]);
    }
    const double d = A[col * m + col];
    for (std::size_t r = col + 1; r < m; ++r) {
      const double factor = A[r * m + col] / d;
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < m; ++c) A[r * m + c] -= factor * A[col * m + c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(m);
  for (std::size_t ri = m; ri-- > 0;) {
    double acc = b[ri];
    for (std::size_t c = ri + 1; c < m; ++c) acc -= A[ri * m + c] * x[c];
    x[ri] = acc / A[ri * m + ri];
  }
  return x;
}

/// Dense Newton iteration on a residual map res(u) with the Jacobian
/// assembled column by column from centered finite differences of res, and
/// full steps solved by dense elimination. Independent of the production
/// linearization and linear solver.
inline ScalarField dense_fd_newton(const TorusGrid& g,
                                   const std::function<ScalarField(const ScalarField&)>& res,
                                   ScalarField u, double tol, int max_iter = 60) {
  const std::size_t m = g.size();
  for (int it = 0; it < max_iter; ++it) {
    const ScalarField r = res(u);
    if (r.sup_norm() <= tol) return u;
    std::vector<double> J(m * m);
    const double eps = 1e-6;
    for (std::size_t col = 0; col < m; ++col) {
      ScalarField up = u, um = u;
      up[col] += eps;
      um[col] -= eps;
      const ScalarField rp = res(up), rm = res(um);
      for (std::size_t row = 0; row < m; ++row) J[row * m + col] = (rp[row] - rm[row]) / (2.0 * eps);
    }
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = -r[i];
    const std::vector<double> step = dense_solve(std::move(J), std::move(rhs));
    for (std::size_t i = 0; i < m; ++i) u[i] += step[i];
  }
  return u;
}

}  // namespace oracle
