#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mapath/calculus.hpp"
#include "mapath/errors.hpp"
#include "mapath/fields.hpp"
#include "mapath/spectral.hpp"

namespace mapath {

/// Fixed data of the Monge-Ampere family: base metric omega, its log-volume
/// density relative to the flat form, and the complex Hessian of that density.
struct ProblemData {
  TorusGrid grid;
  HermitianField omega;
  ScalarField ricci_potential;  ///< log det(omega)
  HermitianField ddc_ricci;     ///< ddc(ricci_potential)
};

inline ProblemData make_problem(const HermitianField& omega, const SpectralOps& ops) {
  for (std::size_t p = 0; p < omega.points(); ++p)
    if (!omega.pos_def_point(p)) throw SingularMetric(p);
  ProblemData out{omega.grid, omega, ScalarField(omega.grid), HermitianField(omega.grid)};
  for (std::size_t p = 0; p < omega.points(); ++p) out.ricci_potential[p] = std::log(omega.det(p));
  out.ddc_ricci = ops.ddc(out.ricci_potential);
  return out;
}

struct SolverConfig {
  double tol = 1e-10;        ///< residual sup-norm target
  int max_newton = 30;
  int max_backtracks = 25;
  double linear_tol = 1e-3;  ///< cap on the inner relative tolerance
  double pos_floor = 1e-8;   ///< smallest admissible eigenvalue of a candidate form
  int max_linear_iters = 500;
};

struct NewtonTraceEntry {
  int iter;
  double residual_sup;
  double lambda;
};

/// One accepted point of the continuity path.
struct ContinuityState {
  double t = 0;
  ScalarField u;
  HermitianField omega_t;  ///< t omega + ddc log omega^n + ddc u
  double residual_sup = 0;
  int newton_iters = 0;
  std::vector<NewtonTraceEntry> trace;
};

/// t omega + ddc_ricci + ddc(u), the candidate Kaehler form.
inline HermitianField candidate_form(const ProblemData& p, double t, const ScalarField& u,
                                     const SpectralOps& ops) {
  HermitianField out = ops.ddc(u);
  out += p.ddc_ricci;
  for (std::size_t q = 0; q < out.points(); ++q) {
    const std::size_t b = q * out.stride();
    for (int i = 0; i < out.grid.n; ++i)
      out.data[b + static_cast<std::size_t>(i)] += t * p.omega.diag(q, i);
    if (out.grid.n == 2) {
      const Complex o01 = p.omega.at(q, 0, 1);
      out.data[b + 2] += t * o01.real();
      out.data[b + 3] += t * o01.imag();
    }
  }
  return out;
}

/// Pointwise residual log(det(form)/det omega) - u; the form must be
/// positive definite everywhere.
inline ScalarField residual_from_form(const ProblemData& p, const HermitianField& form,
                                      const ScalarField& u) {
  ScalarField out(p.grid);
  for (std::size_t q = 0; q < form.points(); ++q) {
    if (!form.pos_def_point(q)) throw PositivityLost(q);
    out[q] = std::log(form.det(q) / p.omega.det(q)) - u[q];
  }
  return out;
}

/// Residual of (MA)_t at (t, u): log((t omega + ddc log omega^n + ddc u)^n
/// / omega^n) - u. Zero exactly when u solves the equation.
inline ScalarField residual(const ProblemData& p, double t, const ScalarField& u,
                            const SpectralOps& ops) {
  if (!(t > 0)) throw std::invalid_argument("residual: t must be positive");
  return residual_from_form(p, candidate_form(p, t, u, ops), u);
}

/// Linearization of the residual map at a state: (Delta_t - 1) h.
inline ScalarField linearized_apply(const ContinuityState& s, const ScalarField& h,
                                    const SpectralOps& ops) {
  ScalarField out = laplacian(s.omega_t, h, ops);
  out -= h;
  return out;
}

namespace detail {

/// tr(adj(A) B) at a point, Hermitian A, B.
inline double trace_adj_prod(const HermitianField& A, const HermitianField& B, std::size_t p) {
  if (A.grid.n == 1) return B.diag(p, 0);
  const Complex a01 = A.at(p, 0, 1);
  const Complex b01 = B.at(p, 0, 1);
  return A.diag(p, 1) * B.diag(p, 0) + A.diag(p, 0) * B.diag(p, 1) -
         2.0 * (a01.real() * b01.real() + a01.imag() * b01.imag());
}

inline double dot(const ScalarField& a, const ScalarField& b) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i] * b[i]);
  return acc.value();
}

/// Solves (Delta_form - 1) h = rhs by preconditioned conjugate directions on
/// the volume-weighted operator L h = tr(adj(form) ddc h) - det(form) h,
/// with the constant-coefficient operator (built from the grid mean of the
/// form) inverted spectrally as preconditioner. Returns h with
/// sup|applied - rhs| <= tol_rel * sup|rhs|.
inline ScalarField solve_linear_form(const HermitianField& form, const ScalarField& rhs,
                                     double tol_rel, const SpectralOps& ops, int max_iters) {
  const TorusGrid& grid = form.grid;
  const std::size_t V = grid.size();
  const double rhs_sup = rhs.sup_norm();
  if (rhs_sup == 0.0) return ScalarField(grid);
  const double target = tol_rel * rhs_sup;

  // weight and constant-coefficient stand-in
  ScalarField w(grid);
  std::array<std::array<Complex, 2>, 2> cbar{};
  {
    CompensatedSum d0, d1, re01, im01;
    for (std::size_t p = 0; p < V; ++p) {
      w[p] = form.det(p);
      d0.add(form.diag(p, 0));
      if (grid.n == 2) {
        d1.add(form.diag(p, 1));
        const Complex o = form.at(p, 0, 1);
        re01.add(o.real());
        im01.add(o.imag());
      }
    }
    const double nv = static_cast<double>(V);
    cbar[0][0] = d0.value() / nv;
    if (grid.n == 2) {
      cbar[1][1] = d1.value() / nv;
      cbar[0][1] = Complex{re01.value() / nv, im01.value() / nv};
      cbar[1][0] = std::conj(cbar[0][1]);
    }
  }
  double wbar = 0;
  {
    CompensatedSum acc;
    for (std::size_t p = 0; p < V; ++p) acc.add(w[p]);
    wbar = acc.value() / static_cast<double>(V);
  }

  // Ahat = -L (positive definite up to spectral asymmetry)
  const auto apply_Ahat = [&](const ScalarField& x) {
    const HermitianField hess = ops.ddc(x);
    ScalarField out(grid);
    for (std::size_t p = 0; p < V; ++p) out[p] = w[p] * x[p] - trace_adj_prod(form, hess, p);
    return out;
  };
  const auto apply_Minv = [&](const ScalarField& r) {
    ScalarField scaled = r;
    scaled *= 1.0 / wbar;
    ScalarField z = ops.invert_flat_helmholtz(scaled, cbar);
    z *= -1.0;
    return z;
  };

  ScalarField x(grid);
  ScalarField r = rhs;  // bhat = -w*rhs; r = bhat - Ahat x with x = 0
  for (std::size_t p = 0; p < V; ++p) r[p] = -w[p] * rhs[p];
  ScalarField z = apply_Minv(r);
  ScalarField pdir = z;
  double rho = dot(r, z);
  int restarts = 0;
  for (int it = 0; it < max_iters; ++it) {
    double sup = 0;
    for (std::size_t p = 0; p < V; ++p) sup = std::max(sup, std::abs(r[p] / w[p]));
    if (sup <= target) return x;

    const ScalarField q = apply_Ahat(pdir);
    const double pq = dot(pdir, q);
    if (!(pq > 0) || !(rho != 0.0)) {
      // lost conjugacy to spectral asymmetry; restart from the current point
      if (++restarts > 3) throw IterationLimit("linear solve restarts exhausted");
      z = apply_Minv(r);
      pdir = z;
      rho = dot(r, z);
      continue;
    }
    const double alpha = rho / pq;
    for (std::size_t p = 0; p < V; ++p) {
      x[p] += alpha * pdir[p];
      r[p] -= alpha * q[p];
    }
    z = apply_Minv(r);
    const double rho_new = dot(r, z);
    const double beta = rho_new / rho;
    rho = rho_new;
    for (std::size_t p = 0; p < V; ++p) pdir[p] = z[p] + beta * pdir[p];
  }
  throw IterationLimit("linear solve did not reach tolerance");
}

}  // namespace detail

/// Inverts (Delta_t - 1) at a state: returns h with
/// sup|linearized_apply(state, h) - rhs| <= tol * sup|rhs|.
inline ScalarField solve_linear(const ContinuityState& s, const ScalarField& rhs, double tol,
                                const SpectralOps& ops, int max_iters = 500) {
  return detail::solve_linear_form(s.omega_t, rhs, tol, ops, max_iters);
}

/// Damped Newton iteration for (MA)_t at fixed t > 0, from u_init.
///
/// Each step solves (Delta_t - 1) h = -residual inexactly (relative
/// tolerance capped by cfg.linear_tol and tightened proportionally to the
/// current residual, which preserves the quadratic tail) and backtracks
/// lambda until the candidate form stays above cfg.pos_floor and the
/// sup-norm residual strictly decreases.
inline ContinuityState solve_at_t(const ProblemData& prob, double t, const ScalarField& u_init,
                                  const SolverConfig& cfg, const SpectralOps& ops) {
  if (!(t > 0)) throw std::invalid_argument("solve_at_t: t must be positive");

  ScalarField u = u_init;
  HermitianField form = candidate_form(prob, t, u, ops);
  {
    double me = min_eigenvalue(form);
    if (!(me > 0)) {
      std::size_t worst = 0;
      for (std::size_t p = 0; p < form.points(); ++p)
        if (form.min_eig_point(p) <= 0) { worst = p; break; }
      throw PositivityLost(worst);
    }
  }
  ScalarField res = residual_from_form(prob, form, u);
  double rsup = res.sup_norm();

  ContinuityState state;
  state.t = t;
  state.trace.push_back({0, rsup, 0.0});

  int accepted_steps = 0;
  for (int it = 1; it <= cfg.max_newton; ++it) {
    if (rsup <= cfg.tol) {
      // freeze the state from a fresh evaluation of (t, u)
      HermitianField fresh = candidate_form(prob, t, u, ops);
      const ScalarField fres = residual_from_form(prob, fresh, u);
      const double fsup = fres.sup_norm();
      if (fsup <= cfg.tol) {
        state.u = std::move(u);
        state.omega_t = std::move(fresh);
        state.residual_sup = fsup;
        state.newton_iters = accepted_steps;
        return state;
      }
      form = std::move(fresh);
      res = fres;
      rsup = fsup;
    }

    const double eta = std::clamp(rsup, 1e-11, cfg.linear_tol);
    ScalarField neg = res;
    neg *= -1.0;
    const ScalarField h = detail::solve_linear_form(form, neg, eta, ops, cfg.max_linear_iters);
    const HermitianField dh = ops.ddc(h);

    double lambda = 1.0;
    bool accepted = false;
    bool any_positive = false;
    std::size_t worst_point = 0;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt, lambda *= 0.5) {
      HermitianField cand = axpby(1.0, form, lambda, dh);
      double me = std::numeric_limits<double>::infinity();
      std::size_t argmin = 0;
      for (std::size_t p = 0; p < cand.points(); ++p) {
        const double e = cand.min_eig_point(p);
        if (e < me) { me = e; argmin = p; }
      }
      if (!(me > cfg.pos_floor)) {
        worst_point = argmin;
        continue;
      }
      any_positive = true;
      const ScalarField u_c = axpy(u, lambda, h);
      const ScalarField res_c = residual_from_form(prob, cand, u_c);
      const double rsup_c = res_c.sup_norm();
      if (rsup_c < rsup) {
        u = u_c;
        form = std::move(cand);
        res = res_c;
        rsup = rsup_c;
        accepted = true;
        ++accepted_steps;
        state.trace.push_back({it, rsup, lambda});
        break;
      }
    }
    if (!accepted) {
      if (!any_positive) throw PositivityLost(worst_point);
      throw NewtonDiverged(rsup);
    }
  }

  if (rsup <= cfg.tol) {
    HermitianField fresh = candidate_form(prob, t, u, ops);
    const ScalarField fres = residual_from_form(prob, fresh, u);
    const double fsup = fres.sup_norm();
    if (fsup <= 2.0 * cfg.tol) {
      state.u = std::move(u);
      state.omega_t = std::move(fresh);
      state.residual_sup = fsup;
      state.newton_iters = accepted_steps;
      return state;
    }
  }
  throw IterationLimit("newton iteration cap at t = " + std::to_string(t));
}

/// Largest quadratic-convergence constant max r_{k+1}/r_k^2 over the last
/// three recorded residuals; NaN when fewer than three are available.
inline double quadratic_tail_constant(const std::vector<NewtonTraceEntry>& trace) {
  if (trace.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const double p2 = trace[trace.size() - 3].residual_sup;
  const double p1 = trace[trace.size() - 2].residual_sup;
  const double p0 = trace[trace.size() - 1].residual_sup;
  double cq = 0;
  if (p2 > 0) cq = std::max(cq, p1 / (p2 * p2));
  if (p1 > 0) cq = std::max(cq, p0 / (p1 * p1));
  return cq;
}

}  // namespace mapath
