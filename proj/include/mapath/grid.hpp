#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace mapath {

/// Uniform periodic grid on the unit torus [0,1)^{2n}, n complex dimensions
/// (n = 1 or 2). Real axes are ordered (x_1, y_1, ..., x_n, y_n) with
/// z_i = x_i + i y_i; axis 0 is the slowest index, the last axis is
/// contiguous. N points per axis, spacing 1/N.
struct TorusGrid {
  int n = 1;
  int N = 32;

  TorusGrid() = default;
  TorusGrid(int n_, int N_) : n(n_), N(N_) {
    if (n != 1 && n != 2) throw std::invalid_argument("complex dimension must be 1 or 2");
    if (!is_pow2(N) || N < 8) throw std::invalid_argument("N must be a power of two, N >= 8");
    const int cap = (n == 1) ? 128 : 64;
    if (N > cap) throw std::invalid_argument("N exceeds cap " + std::to_string(cap));
  }

  static bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

  int real_dims() const { return 2 * n; }

  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < real_dims(); ++a) s *= static_cast<std::size_t>(N);
    return s;
  }

  double spacing() const { return 1.0 / N; }

  /// Quadrature weight of one cell, spacing^{2n}.
  double cell_volume() const {
    double w = 1.0;
    for (int a = 0; a < real_dims(); ++a) w *= spacing();
    return w;
  }

  /// Element stride of a real axis (axis real_dims()-1 is contiguous).
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = real_dims() - 1; a > axis; --a) s *= static_cast<std::size_t>(N);
    return s;
  }

  /// Integer coordinates of a linear index (unused axes stay 0).
  std::array<int, 4> coords(std::size_t idx) const {
    std::array<int, 4> c{0, 0, 0, 0};
    for (int a = real_dims() - 1; a >= 0; --a) {
      c[static_cast<std::size_t>(a)] = static_cast<int>(idx % static_cast<std::size_t>(N));
      idx /= static_cast<std::size_t>(N);
    }
    return c;
  }

  std::size_t index(const std::array<int, 4>& c) const {
    std::size_t idx = 0;
    for (int a = 0; a < real_dims(); ++a)
      idx = idx * static_cast<std::size_t>(N) + static_cast<std::size_t>(c[static_cast<std::size_t>(a)]);
    return idx;
  }

  /// Position of a point along one axis, in [0,1).
  double coord(std::size_t idx, int axis) const {
    return static_cast<double>(coords(idx)[static_cast<std::size_t>(axis)]) * spacing();
  }

  bool operator==(const TorusGrid&) const = default;
};

}  // namespace mapath
