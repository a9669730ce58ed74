#pragma once

#include <span>

namespace interbank {

// Pieces of the quadratic cost functionals. `gap` is target minus own state:
// x_avg - x0 for the major bank, F*x_avg + G*x0 - xi for a minor bank.

struct CostTerms {
  double control = 0.0;    // integral of u^2 / 2
  double cross = 0.0;      // integral of -q u gap
  double deviation = 0.0;  // integral of eps gap^2 / 2
  double terminal = 0.0;   // c gap_T^2 / 2

  double total() const { return control + cross + deviation + terminal; }
};

inline double running_cost(double u, double gap, double q, double eps) {
  return 0.5 * u * u - q * u * gap + 0.5 * eps * gap * gap;
}

inline double terminal_cost(double gap, double c) { return 0.5 * c * gap * gap; }

/// Trapezoidal rule on a uniform grid; `u` and `gap` hold one value per grid point.
CostTerms path_cost(std::span<const double> u, std::span<const double> gap, double dt, double q, double eps,
                    double c);

}  // namespace interbank
