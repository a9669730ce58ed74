#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "interbank/errors.hpp"

namespace interbank {

/// Uniform grid on [0, T] with both endpoints exact.
inline std::vector<double> uniform_grid(double T, int steps) {
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) grid[k] = T * static_cast<double>(k) / static_cast<double>(steps);
  grid.back() = T;
  return grid;
}

/// Classical fourth-order Runge-Kutta, integrated backward from a terminal value.
///
/// `rhs(t, y)` returns dy/dt. The result holds y at every grid point, index 0 being
/// t = 0 and the last entry the (untouched) terminal value. Throws NumericalError
/// naming the first time at which any component leaves [-bound, bound] or stops
/// being finite.
template <std::size_t K, typename Rhs>
std::vector<std::array<double, K>> integrate_backward(Rhs&& rhs, const std::array<double, K>& terminal,
                                                      const std::vector<double>& grid, double bound) {
  using State = std::array<double, K>;
  const std::size_t n = grid.size();
  std::vector<State> ys(n);
  ys[n - 1] = terminal;

  auto axpy = [](const State& y, double h, const State& k) {
    State out;
    for (std::size_t i = 0; i < K; ++i) out[i] = y[i] + h * k[i];
    return out;
  };

  for (std::size_t k = n - 1; k > 0; --k) {
    const double t = grid[k];
    const double h = grid[k] - grid[k - 1];
    const State& y = ys[k];
    // Stepping with -h integrates toward t = 0.
    const State k1 = rhs(t, y);
    const State k2 = rhs(t - 0.5 * h, axpy(y, -0.5 * h, k1));
    const State k3 = rhs(t - 0.5 * h, axpy(y, -0.5 * h, k2));
    const State k4 = rhs(grid[k - 1], axpy(y, -h, k3));
    State next;
    for (std::size_t i = 0; i < K; ++i) {
      next[i] = y[i] - h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
      if (!std::isfinite(next[i]) || std::abs(next[i]) > bound) {
        throw NumericalError("Riccati integration diverged at t=" + std::to_string(grid[k - 1]) +
                             " (component " + std::to_string(i) + ")");
      }
    }
    ys[k - 1] = next;
  }
  return ys;
}

}  // namespace interbank
