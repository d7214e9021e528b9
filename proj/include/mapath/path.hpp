#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mapath/calculus.hpp"
#include "mapath/solver.hpp"

namespace mapath {

/// Continuation schedule from t1 down to t_min > 0. Geometric mode multiplies
/// t by initial_step_ratio each step; linear mode subtracts
/// initial_step_ratio * (t1 - t_min).
struct PathSchedule {
  double t1 = 1.0;
  double t_min = 0.1;
  double initial_step_ratio = 0.7;
  double min_step_ratio = 1e-3;
  bool geometric = true;
};

struct PathEntry {
  double t = 0;
  double max_u = 0;
  double min_u = 0;
  double volume = 0;  ///< integral of det(omega_t)
  double max_S = 0;
  double min_eig = 0;
  int newton_iters = 0;
  int cold_newton_iters = -1;   ///< -1 when not recorded
  double w_cauchy_l2 = 0;       ///< L2 distance of log(1 + max u - u) to the previous entry
  std::string status = "ok";
  std::vector<NewtonTraceEntry> trace;
};

struct PathFailure {
  double t;
  std::string error;
};

struct PathTrace {
  int n = 1;
  double omega_volume = 0;
  std::vector<PathEntry> entries;
  std::vector<PathFailure> failures;
  std::string status;  ///< Completed | StepUnderflow | AttemptCap
  double last_good_t = std::numeric_limits<double>::quiet_NaN();
};

struct PathConfig {
  SolverConfig solver;
  bool record_cold_start = false;
  int max_attempts = 500;
  /// Called once per accepted state, in path order.
  std::function<void(const ContinuityState&, std::size_t)> observer;
};

/// Smallest t making t omega + ddc log omega^n positive, inflated by margin
/// and floored at 1: t1 = margin * max(1, t*), with t* found by bisection to
/// 1e-6. margin must exceed 1.
inline double choose_t1(const ProblemData& p, double margin, const SpectralOps& ops) {
  if (!(margin > 1.0)) throw std::invalid_argument("choose_t1: margin must exceed 1");
  const auto positive_at = [&](double t) {
    return min_eigenvalue(candidate_form(p, t, ScalarField(p.grid), ops)) > 0.0;
  };
  double hi = 1.0;
  int guard = 0;
  while (!positive_at(hi)) {
    hi *= 2.0;
    if (++guard > 60) throw IterationLimit("choose_t1 upper bound search");
  }
  double lo = 0.0;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (mid > 0.0 && positive_at(mid)) ? hi = mid : lo = mid;
  }
  return margin * std::max(1.0, hi);
}

namespace detail {
inline ScalarField log_one_plus_osc(const ScalarField& u) {
  ScalarField out(u.grid);
  const double mx = u.max();
  for (std::size_t p = 0; p < u.size(); ++p) out[p] = std::log(1.0 + mx - u[p]);
  return out;
}

inline double l2_distance(const ScalarField& a, const ScalarField& b) {
  CompensatedSum acc;
  for (std::size_t p = 0; p < a.size(); ++p) acc.add((a[p] - b[p]) * (a[p] - b[p]));
  return std::sqrt(acc.value() * a.grid.cell_volume());
}
}  // namespace detail

/// Drives t from sched.t1 down to sched.t_min, warm-starting each solve from
/// the previous solution (the first solve is cold). A failed solve is
/// retried at the geometric midpoint sqrt(t_prev * t_fail); when the retry
/// step falls below min_step_ratio * t_prev the trace is returned partial
/// with status StepUnderflow. Failures are recorded, never dropped.
inline PathTrace run_path(const ProblemData& p, const PathSchedule& sched, const PathConfig& cfg,
                          const SpectralOps& ops) {
  if (!(sched.t_min > 0) || !(sched.t_min < sched.t1))
    throw std::invalid_argument("run_path: need 0 < t_min < t1");
  if (!(sched.initial_step_ratio > 0) || !(sched.initial_step_ratio < 1) ||
      !(sched.min_step_ratio > 0) || !(sched.min_step_ratio < 1))
    throw std::invalid_argument("run_path: step ratios must lie in (0,1)");

  PathTrace trace;
  trace.n = p.grid.n;
  trace.omega_volume = volume(p.omega);

  ScalarField u_warm(p.grid);
  ScalarField w_prev;
  double t_prev = std::numeric_limits<double>::quiet_NaN();
  bool have_prev = false;
  double t = sched.t1;
  const double lin_step = sched.initial_step_ratio * (sched.t1 - sched.t_min);

  for (int attempts = 0; attempts < cfg.max_attempts; ++attempts) {
    ContinuityState st;
    try {
      st = solve_at_t(p, t, u_warm, cfg.solver, ops);
    } catch (const std::exception& e) {
      trace.failures.push_back({t, e.what()});
      if (!have_prev) {
        trace.status = "StepUnderflow";
        return trace;
      }
      const double t_retry = std::sqrt(t_prev * t);
      if (t_prev - t_retry < sched.min_step_ratio * t_prev) {
        trace.status = "StepUnderflow";
        trace.last_good_t = t_prev;
        return trace;
      }
      t = t_retry;
      continue;
    }

    PathEntry entry;
    entry.t = t;
    entry.max_u = st.u.max();
    entry.min_u = st.u.min();
    entry.volume = volume(st.omega_t);
    entry.max_S = trace_S(st.omega_t, p.omega).max();
    entry.min_eig = min_eigenvalue(st.omega_t);
    entry.newton_iters = st.newton_iters;
    entry.trace = st.trace;
    if (cfg.record_cold_start) {
      try {
        entry.cold_newton_iters = solve_at_t(p, t, ScalarField(p.grid), cfg.solver, ops).newton_iters;
      } catch (const std::exception&) {
        entry.cold_newton_iters = -1;  // cold start not admissible at this t
      }
    }
    ScalarField w = detail::log_one_plus_osc(st.u);
    entry.w_cauchy_l2 = w_prev.size() ? detail::l2_distance(w, w_prev) : 0.0;
    w_prev = std::move(w);

    if (cfg.observer) cfg.observer(st, trace.entries.size());
    u_warm = st.u;
    t_prev = t;
    have_prev = true;
    trace.entries.push_back(std::move(entry));

    if (t <= sched.t_min * (1.0 + 1e-12)) {
      trace.status = "Completed";
      trace.last_good_t = t;
      return trace;
    }
    const double t_next = sched.geometric ? t * sched.initial_step_ratio : t - lin_step;
    t = std::max(t_next, sched.t_min);
  }
  trace.status = "AttemptCap";
  trace.last_good_t = t_prev;
  return trace;
}

/// Least-squares polynomial fit of the volume column against t.
struct VolumeFit {
  int degree = 1;
  std::vector<double> coeffs;  ///< ascending powers
  double intercept = 0;
  double residual_rms = 0;
};

inline VolumeFit extrapolate_volume(const PathTrace& trace, int degree) {
  const std::size_t m = trace.entries.size();
  if (degree < 0) throw std::invalid_argument("extrapolate_volume: degree must be >= 0");
  const std::size_t need = static_cast<std::size_t>(degree) + 2;
  if (m < need) throw InsufficientData("volume fit needs at least degree + 2 path entries");

  // scaled normal equations
  double t_scale = 0;
  for (const auto& e : trace.entries) t_scale = std::max(t_scale, std::abs(e.t));
  const int d = degree + 1;
  std::vector<double> M(static_cast<std::size_t>(d * d), 0.0);
  std::vector<double> rhs(static_cast<std::size_t>(d), 0.0);
  for (const auto& e : trace.entries) {
    const double tau = e.t / t_scale;
    double pa = 1.0;
    std::vector<double> powers(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      powers[static_cast<std::size_t>(a)] = pa;
      pa *= tau;
    }
    for (int a = 0; a < d; ++a) {
      rhs[static_cast<std::size_t>(a)] += powers[static_cast<std::size_t>(a)] * e.volume;
      for (int b = 0; b < d; ++b)
        M[static_cast<std::size_t>(a * d + b)] += powers[static_cast<std::size_t>(a)] * powers[static_cast<std::size_t>(b)];
    }
  }
  // small dense solve with partial pivoting
  std::vector<double> c(rhs);
  {
    std::vector<double> A(M);
    const int mdim = d;
    for (int col = 0; col < mdim; ++col) {
      int piv = col;
      for (int r = col + 1; r < mdim; ++r)
        if (std::abs(A[static_cast<std::size_t>(r * mdim + col)]) > std::abs(A[static_cast<std::size_t>(piv * mdim + col)])) piv = r;
      if (piv != col) {
        for (int cc = 0; cc < mdim; ++cc)
          std::swap(A[static_cast<std::size_t>(col * mdim + cc)], A[static_cast<std::size_t>(piv * mdim + cc)]);
        std::swap(c[static_cast<std::size_t>(col)], c[static_cast<std::size_t>(piv)]);
      }
      for (int r = col + 1; r < mdim; ++r) {
        const double f = A[static_cast<std::size_t>(r * mdim + col)] / A[static_cast<std::size_t>(col * mdim + col)];
        for (int cc = col; cc < mdim; ++cc)
          A[static_cast<std::size_t>(r * mdim + cc)] -= f * A[static_cast<std::size_t>(col * mdim + cc)];
        c[static_cast<std::size_t>(r)] -= f * c[static_cast<std::size_t>(col)];
      }
    }
    for (int r = mdim; r-- > 0;) {
      double acc = c[static_cast<std::size_t>(r)];
      for (int cc = r + 1; cc < mdim; ++cc) acc -= A[static_cast<std::size_t>(r * mdim + cc)] * c[static_cast<std::size_t>(cc)];
      c[static_cast<std::size_t>(r)] = acc / A[static_cast<std::size_t>(r * mdim + r)];
    }
  }

  VolumeFit fit;
  fit.degree = degree;
  fit.coeffs.resize(static_cast<std::size_t>(d));
  double scale_pow = 1.0;
  for (int a = 0; a < d; ++a) {
    fit.coeffs[static_cast<std::size_t>(a)] = c[static_cast<std::size_t>(a)] / scale_pow;
    scale_pow *= t_scale;
  }
  fit.intercept = fit.coeffs[0];
  CompensatedSum sq;
  for (const auto& e : trace.entries) {
    double pv = 0, pw = 1;
    for (int a = 0; a < d; ++a) {
      pv += fit.coeffs[static_cast<std::size_t>(a)] * pw;
      pw *= e.t;
    }
    sq.add((pv - e.volume) * (pv - e.volume));
  }
  fit.residual_rms = std::sqrt(sq.value() / static_cast<double>(m));
  return fit;
}

}  // namespace mapath
