#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "mapath/grid.hpp"

namespace mapath {

using Complex = std::complex<double>;

/// Real-valued grid function.
struct ScalarField {
  TorusGrid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const TorusGrid& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  double max() const { return *std::max_element(v.begin(), v.end()); }
  double min() const { return *std::min_element(v.begin(), v.end()); }
  double sup_norm() const {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  bool finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }

  ScalarField& operator+=(const ScalarField& o) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    return *this;
  }
  ScalarField& operator*=(double s) {
    for (double& x : v) x *= s;
    return *this;
  }
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(double s, ScalarField a) { return a *= s; }

/// a + s*b
inline ScalarField axpy(const ScalarField& a, double s, const ScalarField& b) {
  ScalarField r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.v[i] += s * b.v[i];
  return r;
}

inline ScalarField make_scalar(const TorusGrid& g, const std::function<double(const std::array<double, 4>&)>& f) {
  ScalarField out(g);
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto c = g.coords(p);
    std::array<double, 4> x{};
    for (int a = 0; a < g.real_dims(); ++a) x[static_cast<std::size_t>(a)] = c[static_cast<std::size_t>(a)] * g.spacing();
    out[p] = f(x);
  }
  return out;
}

/// Hermitian n x n matrix per grid point, packed as
///   n = 1: [d0]
///   n = 2: [d0, d1, re01, im01]
/// Lower-triangle entries are implied by conjugation.
struct HermitianField {
  TorusGrid grid;
  std::vector<double> data;

  HermitianField() = default;
  explicit HermitianField(const TorusGrid& g) : grid(g), data(g.size() * pstride(g.n), 0.0) {}

  static std::size_t pstride(int n) { return n == 1 ? 1 : 4; }
  std::size_t stride() const { return pstride(grid.n); }
  std::size_t points() const { return grid.size(); }

  double diag(std::size_t p, int i) const { return data[p * stride() + static_cast<std::size_t>(i)]; }
  double& diag(std::size_t p, int i) { return data[p * stride() + static_cast<std::size_t>(i)]; }

  Complex at(std::size_t p, int i, int j) const {
    if (i == j) return {diag(p, i), 0.0};
    const std::size_t b = p * stride();
    if (i < j) return {data[b + 2], data[b + 3]};
    return {data[b + 2], -data[b + 3]};
  }

  void set(std::size_t p, int i, int j, Complex val) {
    const std::size_t b = p * stride();
    if (i == j) {
      data[b + static_cast<std::size_t>(i)] = val.real();
    } else if (i < j) {
      data[b + 2] = val.real();
      data[b + 3] = val.imag();
    } else {
      data[b + 2] = val.real();
      data[b + 3] = -val.imag();
    }
  }

  double trace(std::size_t p) const {
    return grid.n == 1 ? diag(p, 0) : diag(p, 0) + diag(p, 1);
  }

  double det(std::size_t p) const {
    if (grid.n == 1) return diag(p, 0);
    const std::size_t b = p * stride();
    return data[b] * data[b + 1] - (data[b + 2] * data[b + 2] + data[b + 3] * data[b + 3]);
  }

  /// Smallest eigenvalue of the point matrix.
  double min_eig_point(std::size_t p) const {
    if (grid.n == 1) return diag(p, 0);
    const double m = 0.5 * trace(p);
    const double d = det(p);
    const double disc = std::max(0.0, m * m - d);
    return m - std::sqrt(disc);
  }

  double max_eig_point(std::size_t p) const {
    if (grid.n == 1) return diag(p, 0);
    const double m = 0.5 * trace(p);
    const double d = det(p);
    const double disc = std::max(0.0, m * m - d);
    return m + std::sqrt(disc);
  }

  /// Sylvester test for positive definiteness.
  bool pos_def_point(std::size_t p) const {
    if (grid.n == 1) return diag(p, 0) > 0.0;
    return diag(p, 0) > 0.0 && det(p) > 0.0;
  }

  /// this <- this + s * I at every point.
  void add_scaled_identity(double s) {
    const std::size_t st = stride();
    for (std::size_t p = 0; p < points(); ++p)
      for (int i = 0; i < grid.n; ++i) data[p * st + static_cast<std::size_t>(i)] += s;
  }

  HermitianField& operator+=(const HermitianField& o) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
    return *this;
  }
  HermitianField& operator*=(double s) {
    for (double& x : data) x *= s;
    return *this;
  }
};

inline HermitianField operator*(double s, HermitianField a) { return a *= s; }
inline HermitianField operator+(HermitianField a, const HermitianField& b) { return a += b; }

/// a*A + b*B
inline HermitianField axpby(double a, const HermitianField& A, double b, const HermitianField& B) {
  HermitianField r = A;
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] = a * A.data[i] + b * B.data[i];
  return r;
}

inline HermitianField identity_field(const TorusGrid& g, double scale = 1.0) {
  HermitianField h(g);
  h.add_scaled_identity(scale);
  return h;
}

/// tr(A(p)^{-1} B(p)) for Hermitian A, B; A must be nonsingular at p.
inline double trace_prod_inv(const HermitianField& A, const HermitianField& B, std::size_t p) {
  if (A.grid.n == 1) return B.diag(p, 0) / A.diag(p, 0);
  const double det = A.det(p);
  const Complex a01 = A.at(p, 0, 1);
  const Complex b01 = B.at(p, 0, 1);
  const double num = A.diag(p, 1) * B.diag(p, 0) + A.diag(p, 0) * B.diag(p, 1) -
                     2.0 * (a01.real() * b01.real() + a01.imag() * b01.imag());
  return num / det;
}

/// Generalized eigenvalues of the pencil (A, B): roots of det(A - lambda B).
/// B must be positive definite at p. Returns {min, max}.
inline std::pair<double, double> pencil_eigs(const HermitianField& A, const HermitianField& B, std::size_t p) {
  if (A.grid.n == 1) {
    const double l = A.diag(p, 0) / B.diag(p, 0);
    return {l, l};
  }
  const double detB = B.det(p);
  const Complex a01 = A.at(p, 0, 1);
  const Complex b01 = B.at(p, 0, 1);
  // tr(adj(B) A)
  const double mixed = B.diag(p, 1) * A.diag(p, 0) + B.diag(p, 0) * A.diag(p, 1) -
                       2.0 * (b01.real() * a01.real() + b01.imag() * a01.imag());
  const double detA = A.det(p);
  const double disc = std::max(0.0, mixed * mixed - 4.0 * detA * detB);
  const double root = std::sqrt(disc);
  return {(mixed - root) / (2.0 * detB), (mixed + root) / (2.0 * detB)};
}

}  // namespace mapath
