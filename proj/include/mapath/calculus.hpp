#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "mapath/errors.hpp"
#include "mapath/fields.hpp"
#include "mapath/spectral.hpp"

namespace mapath {

/// Compensated (Neumaier) sum; sequential by contract so results do not
/// depend on the thread setting.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

/// base + ddc(phi); base must be a constant positive definite field. The
/// result is a candidate metric only, positivity is the caller's check.
inline HermitianField metric_from_potential(const HermitianField& base, const ScalarField& phi,
                                            const SpectralOps& ops) {
  const std::size_t st = base.stride();
  for (std::size_t i = 0; i < base.data.size(); ++i) {
    if (base.data[i] != base.data[i % st])
      throw std::invalid_argument("metric_from_potential: base must be constant");
  }
  if (!base.pos_def_point(0)) throw std::invalid_argument("metric_from_potential: base must be positive definite");
  HermitianField out = ops.ddc(phi);
  out += base;
  return out;
}

/// Infimum over grid points of the smallest eigenvalue (relative to the flat
/// identity metric).
inline double min_eigenvalue(const HermitianField& h) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < h.points(); ++p) m = std::min(m, h.min_eig_point(p));
  return m;
}

/// Pointwise log(det a / det b). b must be positive definite everywhere;
/// det a must be positive everywhere.
inline ScalarField log_ratio_det(const HermitianField& a, const HermitianField& b) {
  ScalarField out(a.grid);
  for (std::size_t p = 0; p < a.points(); ++p) {
    if (!b.pos_def_point(p)) throw SingularMetric(p);
    const double da = a.det(p);
    if (!(da > 0.0)) throw NonPositiveDeterminant(p);
    out[p] = std::log(da / b.det(p));
  }
  return out;
}

/// Kaehler Laplacian tr(g^{-1} ddc f); g must be positive definite.
inline ScalarField laplacian(const HermitianField& g, const ScalarField& f, const SpectralOps& ops) {
  const HermitianField hess = ops.ddc(f);
  ScalarField out(f.grid);
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (!g.pos_def_point(p)) throw SingularMetric(p);
    out[p] = trace_prod_inv(g, hess, p);
  }
  return out;
}

/// |grad f|^2_g = sum g^{i jbar} f_{z_i} f_{zbar_j} with f_z = (f_x - i f_y)/2.
inline ScalarField grad_norm_sq(const HermitianField& g, const ScalarField& f, const SpectralOps& ops) {
  const int n = f.grid.n;
  std::vector<Complex> p0 = ops.dz(f, 0);
  std::vector<Complex> p1;
  if (n == 2) p1 = ops.dz(f, 1);
  ScalarField out(f.grid);
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (!g.pos_def_point(p)) throw SingularMetric(p);
    if (n == 1) {
      out[p] = std::norm(p0[p]) / g.diag(p, 0);
    } else {
      const Complex g01 = g.at(p, 0, 1);
      const double num = g.diag(p, 1) * std::norm(p0[p]) + g.diag(p, 0) * std::norm(p1[p]) -
                         2.0 * (g01 * std::conj(p0[p]) * p1[p]).real();
      out[p] = num / g.det(p);
    }
  }
  return out;
}

/// Integral of f against det(vol) on the unit torus (rectangle rule, exact
/// for band-limited integrands).
inline double integrate(const ScalarField& f, const HermitianField& vol) {
  CompensatedSum acc;
  for (std::size_t p = 0; p < f.size(); ++p) acc.add(f[p] * vol.det(p));
  return acc.value() * f.grid.cell_volume();
}

/// Integral against the flat volume form.
inline double integrate(const ScalarField& f) {
  CompensatedSum acc;
  for (std::size_t p = 0; p < f.size(); ++p) acc.add(f[p]);
  return acc.value() * f.grid.cell_volume();
}

/// Total volume: integral of det(vol).
inline double volume(const HermitianField& vol) {
  CompensatedSum acc;
  for (std::size_t p = 0; p < vol.points(); ++p) acc.add(vol.det(p));
  return acc.value() * vol.grid.cell_volume();
}

/// Trace of omega with respect to omega_t, pointwise tr(g_t^{-1} g); equals
/// sigma_{n-1}/sigma_n of the eigenvalues of omega_t relative to omega.
inline ScalarField trace_S(const HermitianField& omega_t, const HermitianField& omega) {
  ScalarField out(omega.grid);
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (!omega_t.pos_def_point(p)) throw SingularMetric(p);
    out[p] = trace_prod_inv(omega_t, omega, p);
  }
  return out;
}

/// Extrema over the grid of the generalized eigenvalues of (a, b).
inline std::pair<double, double> relative_eig_range(const HermitianField& a, const HermitianField& b) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t p = 0; p < a.points(); ++p) {
    const auto [mn, mx] = pencil_eigs(a, b, p);
    lo = std::min(lo, mn);
    hi = std::max(hi, mx);
  }
  return {lo, hi};
}

}  // namespace mapath
