#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "mapath/calculus.hpp"
#include "mapath/random_fields.hpp"
#include "mapath/solver.hpp"
#include "oracles.hpp"

using namespace mapath;
using std::numbers::pi;

namespace {
ProblemData flat_problem(int n, int N) {
  TorusGrid g(n, N);
  SpectralOps ops(g);
  return make_problem(identity_field(g), ops);
}

ProblemData perturbed_problem(const TorusGrid& g, const ScalarField& phi, const SpectralOps& ops) {
  return make_problem(metric_from_potential(identity_field(g), phi, ops), ops);
}
}  // namespace

TEST_CASE("problem data is internally consistent", "[solver]") {
  TorusGrid g(1, 32);
  SpectralOps ops(g);
  const ProblemData p = perturbed_problem(g, cosine_mode(g, {1, 0, 0, 0}, 0.01), ops);
  const HermitianField rebuilt = ops.ddc(p.ricci_potential);
  for (std::size_t i = 0; i < rebuilt.data.size(); ++i)
    REQUIRE(std::abs(rebuilt.data[i] - p.ddc_ricci.data[i]) < 1e-12);
}

TEST_CASE("residual closed forms", "[solver]") {
  SECTION("flat, u = n log t") {
    for (int n : {1, 2}) {
      const ProblemData p = flat_problem(n, n == 1 ? 32 : 8);
      SpectralOps ops(p.grid);
      const double t = 0.37;
      const ScalarField u(p.grid, n * std::log(t));
      REQUIRE(residual(p, t, u, ops).sup_norm() < 1e-13);
    }
  }
  SECTION("flat, t = 1, u = 0") {
    const ProblemData p = flat_problem(1, 32);
    SpectralOps ops(p.grid);
    REQUIRE(residual(p, 1.0, ScalarField(p.grid), ops).sup_norm() < 1e-13);
  }
  SECTION("perturbed matches the per-point determinant oracle") {
    TorusGrid g(1, 32);
    SpectralOps ops(g);
    const ProblemData p = perturbed_problem(g, cosine_mode(g, {1, 0, 0, 0}, 0.01), ops);
    const ScalarField r = residual(p, 1.0, ScalarField(g), ops);
    REQUIRE(r.sup_norm() > 1e-3);  // nonzero
    const HermitianField form = candidate_form(p, 1.0, ScalarField(g), ops);
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double expect = std::log(form.det(q) / p.omega.det(q));
      REQUIRE(std::abs(r[q] - expect) < 1e-12);
    }
  }
  SECTION("t <= 0 is rejected") {
    const ProblemData p = flat_problem(1, 8);
    SpectralOps ops(p.grid);
    REQUIRE_THROWS_AS(residual(p, 0.0, ScalarField(p.grid), ops), std::invalid_argument);
    REQUIRE_THROWS_AS(solve_at_t(p, -1.0, ScalarField(p.grid), SolverConfig{}, ops),
                      std::invalid_argument);
  }
  SECTION("positivity loss is reported") {
    const ProblemData p = flat_problem(1, 8);
    SpectralOps ops(p.grid);
    // huge negative ddc u ruins positivity at t = 0.05
    const ScalarField u = cosine_mode(p.grid, {1, 0, 0, 0}, 1.0);
    REQUIRE_THROWS_AS(residual(p, 0.05, u, ops), PositivityLost);
  }
}

TEST_CASE("linearized_apply closed forms and Gateaux check", "[solver]") {
  const ProblemData p = flat_problem(1, 32);
  SpectralOps ops(p.grid);
  const SolverConfig cfg;
  const ContinuityState s = solve_at_t(p, 1.0, ScalarField(p.grid), cfg, ops);

  SECTION("constants map to their negation") {
    const ScalarField h(p.grid, 3.25);
    const ScalarField out = linearized_apply(s, h, ops);
    for (std::size_t q = 0; q < out.size(); ++q) REQUIRE(out[q] == Catch::Approx(-3.25).margin(1e-12));
  }
  SECTION("flat eigenfunction") {
    const ScalarField h = cosine_mode(p.grid, {1, 0, 0, 0}, 1.0);
    const ScalarField out = linearized_apply(s, h, ops);
    for (std::size_t q = 0; q < out.size(); ++q)
      REQUIRE(out[q] == Catch::Approx((-pi * pi - 1.0) * h[q]).margin(1e-10));
  }
  SECTION("directional derivative of the residual") {
    TorusGrid g(1, 32);
    SpectralOps ops2(g);
    const ProblemData pp = perturbed_problem(g, cosine_mode(g, {1, 0, 0, 0}, 0.01), ops2);
    const ContinuityState st = solve_at_t(pp, 1.0, ScalarField(g), cfg, ops2);
    const ScalarField h = random_band_limited(g, 5, 1, 0.1);
    const double eps = 1e-5;
    const ScalarField up = axpy(st.u, eps, h);
    const ScalarField fd = (1.0 / eps) * (residual(pp, 1.0, up, ops2) - residual(pp, 1.0, st.u, ops2));
    const ScalarField lin = linearized_apply(st, h, ops2);
    for (std::size_t q = 0; q < g.size(); ++q) REQUIRE(std::abs(fd[q] - lin[q]) < 1e-4);
  }
}

TEST_CASE("solve_linear closed forms and dense oracle", "[solver]") {
  const SolverConfig cfg;

  SECTION("constant right-hand side") {
    const ProblemData p = flat_problem(1, 32);
    SpectralOps ops(p.grid);
    const ContinuityState s = solve_at_t(p, 1.0, ScalarField(p.grid), cfg, ops);
    const ScalarField h = solve_linear(s, ScalarField(p.grid, -2.5), 1e-12, ops);
    for (std::size_t q = 0; q < h.size(); ++q) REQUIRE(h[q] == Catch::Approx(2.5).margin(1e-10));
  }
  SECTION("flat eigenfunction inverse") {
    const ProblemData p = flat_problem(1, 32);
    SpectralOps ops(p.grid);
    const ContinuityState s = solve_at_t(p, 1.0, ScalarField(p.grid), cfg, ops);
    const ScalarField rhs = cosine_mode(p.grid, {1, 0, 0, 0}, 1.0);
    const ScalarField h = solve_linear(s, rhs, 1e-12, ops);
    for (std::size_t q = 0; q < h.size(); ++q)
      REQUIRE(h[q] == Catch::Approx(rhs[q] / (-pi * pi - 1.0)).margin(1e-10));
  }
  SECTION("perturbed state matches dense LU of the assembled operator") {
    TorusGrid g(1, 8);
    SpectralOps ops(g);
    const ProblemData p = perturbed_problem(g, cosine_mode(g, {1, 0, 0, 0}, 0.01), ops);
    const ContinuityState s = solve_at_t(p, 1.0, ScalarField(g), cfg, ops);
    const ScalarField rhs = random_band_limited(g, 9, 2, 1.0);
    const ScalarField h = solve_linear(s, rhs, 1e-10, ops);
    // contract: applied residual within tolerance
    const ScalarField applied = linearized_apply(s, h, ops);
    double sup = 0;
    for (std::size_t q = 0; q < g.size(); ++q) sup = std::max(sup, std::abs(applied[q] - rhs[q]));
    REQUIRE(sup <= 1e-10 * rhs.sup_norm() * 1.01);
    // dense assembly oracle
    const std::size_t V = g.size();
    std::vector<double> A(V * V);
    for (std::size_t col = 0; col < V; ++col) {
      ScalarField e(g);
      e[col] = 1.0;
      const ScalarField Ae = linearized_apply(s, e, ops);
      for (std::size_t row = 0; row < V; ++row) A[row * V + col] = Ae[row];
    }
    const std::vector<double> hd = oracle::dense_solve(std::move(A), rhs.v);
    for (std::size_t q = 0; q < V; ++q) REQUIRE(std::abs(h[q] - hd[q]) < 1e-6);
  }
}

TEST_CASE("solve_at_t flat closed form", "[solver]") {
  const SolverConfig cfg;
  for (int n : {1, 2}) {
    const ProblemData p = flat_problem(n, n == 1 ? 32 : 8);
    SpectralOps ops(p.grid);
    for (double t : {1.0, 0.5, 0.1}) {
      const ContinuityState s = solve_at_t(p, t, ScalarField(p.grid), cfg, ops);
      double sup = 0;
      for (std::size_t q = 0; q < s.u.size(); ++q) sup = std::max(sup, std::abs(s.u[q] - n * std::log(t)));
      REQUIRE(sup <= 1e-10);
      REQUIRE(min_eigenvalue(s.omega_t) > 0);
      REQUIRE(s.residual_sup <= cfg.tol);
    }
  }
}

TEST_CASE("solve_at_t matches the dense finite-difference-Jacobian Newton oracle", "[solver]") {
  TorusGrid g(1, 8);
  SpectralOps ops(g);
  const ScalarField phi = cosine_mode(g, {1, 0, 0, 0}, 0.01);
  const ProblemData p = perturbed_problem(g, phi, ops);
  const ContinuityState s = solve_at_t(p, 1.0, ScalarField(g), SolverConfig{}, ops);
  const ScalarField ud = oracle::dense_fd_newton(
      g, [&](const ScalarField& u) { return residual(p, 1.0, u, ops); }, ScalarField(g), 1e-11);
  double sup = 0;
  for (std::size_t q = 0; q < g.size(); ++q) sup = std::max(sup, std::abs(s.u[q] - ud[q]));
  REQUIRE(sup < 1e-8);
}

TEST_CASE("accepted states verify against a fresh residual evaluation", "[solver]") {
  TorusGrid g(1, 32);
  SpectralOps ops(g);
  const SolverConfig cfg;
  const ProblemData p = perturbed_problem(g, cosine_mode(g, {1, 0, 0, 0}, 0.006), ops);
  const ContinuityState s = solve_at_t(p, 0.7, ScalarField(g), cfg, ops);
  REQUIRE(residual(p, 0.7, s.u, ops).sup_norm() <= 2.0 * cfg.tol);
  // cached form consistent with (t, u)
  const HermitianField rebuilt = candidate_form(p, 0.7, s.u, ops);
  for (std::size_t i = 0; i < rebuilt.data.size(); ++i)
    REQUIRE(std::abs(rebuilt.data[i] - s.omega_t.data[i]) < 1e-12);
}

TEST_CASE("mean-value normalization and volume identity", "[solver]") {
  TorusGrid g(1, 32);
  SpectralOps ops(g);
  const ProblemData p = perturbed_problem(g, cosine_mode(g, {1, 0, 0, 0}, 0.01), ops);
  const double vol_omega = volume(p.omega);
  ScalarField u_init(g);  // t = 0.4 is warm-started from the t = 1 solution
  for (double t : {1.0, 0.4}) {
    const ContinuityState s = solve_at_t(p, t, u_init, SolverConfig{}, ops);
    u_init = s.u;
    ScalarField eu(g);
    for (std::size_t q = 0; q < g.size(); ++q) eu[q] = std::exp(s.u[q]);
    const double lhs = integrate(eu, p.omega);
    const double rhs = volume(s.omega_t);
    REQUIRE(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
    REQUIRE(std::abs(rhs - t * vol_omega) <= 1e-8 * t * vol_omega);
  }
  SECTION("n=2 volume identity") {
    TorusGrid g2(2, 8);
    SpectralOps ops2(g2);
    const ProblemData p2 = perturbed_problem(g2, random_band_limited(g2, 3, 1, 0.01), ops2);
    const double v2 = volume(p2.omega);
    // walk down from an admissible start
    double t_hi = 1.0;
    while (!(min_eigenvalue(candidate_form(p2, t_hi, ScalarField(g2), ops2)) > 0)) t_hi *= 2.0;
    ContinuityState s2 = solve_at_t(p2, t_hi, ScalarField(g2), SolverConfig{}, ops2);
    for (double t = 0.7 * t_hi; t > 0.5; t *= 0.7) s2 = solve_at_t(p2, t, s2.u, SolverConfig{}, ops2);
    s2 = solve_at_t(p2, 0.5, s2.u, SolverConfig{}, ops2);
    REQUIRE(std::abs(volume(s2.omega_t) - 0.25 * v2) <= 1e-8 * 0.25 * v2);
  }
}

TEST_CASE("quadratic newton tail", "[solver]") {
  TorusGrid g(1, 32);
  SpectralOps ops(g);
  const ProblemData p = perturbed_problem(g, cosine_mode(g, {1, 0, 0, 0}, 0.012), ops);
  const ContinuityState s = solve_at_t(p, 1.0, ScalarField(g), SolverConfig{}, ops);
  REQUIRE(s.trace.size() >= 3);
  const double cq = quadratic_tail_constant(s.trace);
  REQUIRE(std::isfinite(cq));
  REQUIRE(cq < 1e3);
}

TEST_CASE("uniqueness at fixed t", "[solver]") {
  TorusGrid g(1, 32);
  SpectralOps ops(g);
  const SolverConfig cfg;
  const ProblemData p = perturbed_problem(g, cosine_mode(g, {1, 0, 0, 0}, 0.01), ops);
  const ContinuityState a = solve_at_t(p, 0.9, ScalarField(g), cfg, ops);
  const ScalarField other_init = random_band_limited(g, 31, 1, 0.002);
  const ContinuityState b = solve_at_t(p, 0.9, other_init, cfg, ops);
  double sup = 0;
  for (std::size_t q = 0; q < g.size(); ++q) sup = std::max(sup, std::abs(a.u[q] - b.u[q]));
  REQUIRE(sup <= 5.0 * cfg.tol);
}

TEST_CASE("solver error paths", "[solver]") {
  TorusGrid g(1, 16);
  SpectralOps ops(g);
  const ProblemData p = flat_problem(1, 16);

  SECTION("huge positivity floor trips PositivityLost") {
    SolverConfig cfg;
    cfg.pos_floor = 10.0;
    REQUIRE_THROWS_AS(solve_at_t(p, 1.1, ScalarField(g), cfg, ops), PositivityLost);
  }
  SECTION("inadmissible start trips PositivityLost") {
    SolverConfig cfg;
    const ScalarField bad = cosine_mode(g, {1, 0, 0, 0}, 1.0);
    REQUIRE_THROWS_AS(solve_at_t(p, 0.05, bad, cfg, ops), PositivityLost);
  }
  SECTION("tiny newton budget trips IterationLimit") {
    SolverConfig cfg;
    cfg.max_newton = 1;
    SpectralOps ops16(g);
    const ProblemData pp =
        make_problem(metric_from_potential(identity_field(g), cosine_mode(g, {1, 0, 0, 0}, 0.01), ops16), ops16);
    REQUIRE_THROWS_AS(solve_at_t(pp, 1.0, ScalarField(g), cfg, ops16), IterationLimit);
  }
}
