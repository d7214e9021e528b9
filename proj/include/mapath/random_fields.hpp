#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "mapath/fields.hpp"

namespace mapath {

/// cos(2 pi k.x + phase) mode with integer frequency vector k over the real axes.
inline ScalarField cosine_mode(const TorusGrid& g, const std::array<int, 4>& k, double amplitude,
                               double phase = 0.0) {
  ScalarField out(g);
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto c = g.coords(p);
    double arg = phase;
    for (int a = 0; a < g.real_dims(); ++a)
      arg += 2.0 * std::numbers::pi * k[static_cast<std::size_t>(a)] * c[static_cast<std::size_t>(a)] * g.spacing();
    out[p] = amplitude * std::cos(arg);
  }
  return out;
}

/// Deterministic band-limited random field: sum of cosine modes with
/// |k|_inf <= kmax, random coefficients and phases, normalized so the sup
/// norm is close to (and never above) `amplitude`.
inline ScalarField random_band_limited(const TorusGrid& g, std::uint64_t seed, int kmax, double amplitude) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  const int d = g.real_dims();
  ScalarField out(g);
  // enumerate representatives k with first nonzero component positive
  std::array<int, 4> k{0, 0, 0, 0};
  std::vector<std::array<int, 4>> reps;
  const int lo = -kmax;
  std::array<int, 4> cur{lo, lo, lo, lo};
  for (int a = d; a < 4; ++a) cur[static_cast<std::size_t>(a)] = 0;
  while (true) {
    bool nonzero = false, leadpos = false;
    for (int a = 0; a < d; ++a) {
      if (cur[static_cast<std::size_t>(a)] != 0) {
        nonzero = true;
        leadpos = cur[static_cast<std::size_t>(a)] > 0;
        break;
      }
    }
    if (nonzero && leadpos) reps.push_back(cur);
    int a = d - 1;
    for (; a >= 0; --a) {
      if (++cur[static_cast<std::size_t>(a)] <= kmax) break;
      cur[static_cast<std::size_t>(a)] = lo;
    }
    if (a < 0) break;
  }
  for (const auto& rep : reps) {
    k = rep;
    out += cosine_mode(g, k, coef(rng), ph(rng));
  }
  const double sup = out.sup_norm();
  if (sup > 0) out *= amplitude / sup;
  return out;
}

}  // namespace mapath
