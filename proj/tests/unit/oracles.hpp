#pragma once

#include <cmath>

// Independent reference solutions used by several test files.

namespace oracle {

// eta = -phi solves eta' = eta^2 + 2 A eta - B with eta(T) = c, A = a + q,
// B = eps - q^2. Closed form through the two constant roots r1 > r2.
inline double benchmark_eta(double t, double a, double q, double eps, double c, double T) {
  const double A = a + q;
  const double B = eps - q * q;
  const double s = std::sqrt(A * A + B);
  const double r1 = -A + s;
  const double r2 = -A - s;
  const double K = (c - r1) / (c - r2) * std::exp(2.0 * s * (t - T));
  return (r1 - K * r2) / (1.0 - K);
}

inline double benchmark_phi(double t, double a, double q, double eps, double c, double T) {
  return -benchmark_eta(t, a, q, eps, c, T);
}

}  // namespace oracle
