#include "interbank/riccati.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "interbank/errors.hpp"
#include "interbank/ode.hpp"

namespace interbank {

namespace {

// Relative tolerance when checking that a supplied phi path matches the one
// recomputed alongside phi0 or P.
constexpr double kGridMatchTol = 1e-12;
constexpr double kSymmetryTol = 1e-10;

double minor_rhs(const MarketParams& p, double phi) {
  return 2.0 * (p.a + p.q) * phi - phi * phi + p.eps - p.q * p.q;
}

double major_rhs(const MarketParams& p, Phi0Form form, double phi, double phi0) {
  double coupling = 0.0;
  switch (form) {
    case Phi0Form::TheoremAsPublished: coupling = (p.a + p.q - phi) * p.G * phi0; break;
    case Phi0Form::AppendixPrinted: coupling = (p.a + p.q + phi) * p.G * phi0; break;
    case Phi0Form::DerivationConsistent: coupling = 2.0 * (p.a + p.q - phi) * p.G * phi0; break;
  }
  return 2.0 * (p.a0 + p.q0) * phi0 - phi0 * phi0 + coupling + p.eps0 - p.q0 * p.q0;
}

void check_steps(const RiccatiOptions& opts) {
  if (opts.steps < 2) throw NumericalError("Riccati integration needs at least 2 steps");
}

void check_phi_matches(const CoefficientPath& supplied, const std::vector<double>& grid,
                       const std::vector<double>& recomputed) {
  if (supplied.grid.size() != grid.size() || supplied.values.size() != grid.size() ||
      supplied.grid.back() != grid.back()) {
    throw NumericalError("grid mismatch: phi path has " + std::to_string(supplied.grid.size()) +
                         " points, expected " + std::to_string(grid.size()));
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double scale = std::max(1.0, std::abs(recomputed[k]));
    if (std::abs(supplied.values[k] - recomputed[k]) > kGridMatchTol * scale) {
      throw NumericalError("grid mismatch: phi path was not produced with these parameters (t=" +
                           std::to_string(grid[k]) + ")");
    }
  }
}

double interpolate(const std::vector<double>& grid, const std::vector<double>& values, double t) {
  if (t <= grid.front()) return values.front();
  if (t >= grid.back()) return values.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

}  // namespace

std::string_view to_string(StrategyMode mode) {
  switch (mode) {
    case StrategyMode::TheoremAsPublished: return "theorem";
    case StrategyMode::DerivationConsistent: return "derivation";
    case StrategyMode::MatrixOracle: return "oracle";
  }
  return "unknown";
}

StrategyMode parse_mode(std::string_view text) {
  if (text == "theorem") return StrategyMode::TheoremAsPublished;
  if (text == "derivation") return StrategyMode::DerivationConsistent;
  if (text == "oracle") return StrategyMode::MatrixOracle;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected theorem|derivation|oracle)");
}

std::string_view to_string(Phi0Form form) {
  switch (form) {
    case Phi0Form::TheoremAsPublished: return "theorem";
    case Phi0Form::AppendixPrinted: return "appendix";
    case Phi0Form::DerivationConsistent: return "derivation";
  }
  return "unknown";
}

double RiccatiSolution::phi_at(double t) const { return interpolate(grid, phi, t); }
double RiccatiSolution::phi0_at(double t) const { return interpolate(grid, phi0, t); }

ExtendedSystem build_extended_system(const MarketParams& p) {
  ExtendedSystem s;
  s.params = p;
  s.A0_tilde << -p.a0, p.a0, p.a * p.G, p.a * (p.F - 1.0);
  s.B0 << 1.0, 0.0;
  s.B0_tilde << 0.0, 1.0;
  s.Sigma0 << p.sigma0, 0.0, 0.0, 0.0;
  s.Q0 << p.eps0, -p.eps0, -p.eps0, p.eps0;
  s.N0 << p.q0, -p.q0;
  s.G0 << p.c0, -p.c0, -p.c0, p.c0;

  s.B << 1.0, 0.0, 0.0;
  s.B_tilde << 0.0, 0.0, 1.0;
  s.Sigma.setZero();
  s.Sigma(0, 0) = p.sigma;
  s.Sigma.block<2, 2>(1, 1) = s.Sigma0;
  // The minor's target is F*x_avg + G*x0, so its weights act on (xi, x0, x_avg) = (1, -G, -F).
  const Eigen::Vector3d w(1.0, -p.G, -p.F);
  s.Q = p.eps * w * w.transpose();
  s.N = p.q * w;
  s.Q_hat = p.c * w * w.transpose();
  s.K << 0.0, p.G, p.F - 1.0;
  return s;
}

Eigen::Matrix2d ExtendedSystem::closed_loop_drift(double phi_t) const {
  const MarketParams& p = params;
  Eigen::Matrix2d A = A0_tilde;
  const Eigen::RowVector2d mean_field_gain(p.G, p.F - 1.0);
  A += B0_tilde * ((p.q - phi_t) * mean_field_gain);
  return A;
}

Eigen::Matrix3d ExtendedSystem::minor_drift(double phi0_t) const {
  const MarketParams& p = params;
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  A(0, 0) = -p.a;
  A(0, 1) = p.a * p.G;
  A(0, 2) = p.a * p.F;
  const Eigen::RowVector2d major_gain = -(p.q0 - phi0_t) * Eigen::RowVector2d(1.0, -1.0);
  A.block<2, 2>(1, 1) = A0_tilde + B0 * major_gain;
  return A;
}

CoefficientPath solve_minor_phi(const MarketParams& p, const RiccatiOptions& opts) {
  check_steps(opts);
  CoefficientPath out;
  out.grid = uniform_grid(p.T, opts.steps);
  const auto ys = integrate_backward<1>(
      [&](double, const std::array<double, 1>& y) { return std::array<double, 1>{minor_rhs(p, y[0])}; },
      {-p.c}, out.grid, opts.blowup_bound);
  out.values.reserve(ys.size());
  for (const auto& y : ys) out.values.push_back(y[0]);
  return out;
}

CoefficientPath solve_major_phi0(const MarketParams& p, const CoefficientPath& phi, Phi0Form form,
                                 const RiccatiOptions& opts) {
  check_steps(opts);
  CoefficientPath out;
  out.grid = uniform_grid(p.T, opts.steps);
  // phi is carried along so that the RK4 stages see phi at the half steps.
  const auto ys = integrate_backward<2>(
      [&](double, const std::array<double, 2>& y) {
        return std::array<double, 2>{minor_rhs(p, y[0]), major_rhs(p, form, y[0], y[1])};
      },
      {-p.c, -p.c0}, out.grid, opts.blowup_bound);

  std::vector<double> phi_recomputed;
  phi_recomputed.reserve(ys.size());
  out.values.reserve(ys.size());
  for (const auto& y : ys) {
    phi_recomputed.push_back(y[0]);
    out.values.push_back(y[1]);
  }
  check_phi_matches(phi, out.grid, phi_recomputed);
  return out;
}

OraclePath solve_major_lqr_oracle(const ExtendedSystem& sys, const CoefficientPath& phi,
                                  const RiccatiOptions& opts) {
  check_steps(opts);
  const MarketParams& p = sys.params;
  OraclePath out;
  out.grid = uniform_grid(p.T, opts.steps);

  // State layout: phi, then P row-major. All four entries of P are integrated so
  // that symmetry is an observable rather than an assumption.
  using State = std::array<double, 5>;
  auto rhs = [&](double, const State& y) {
    Eigen::Matrix2d P;
    P << y[1], y[2], y[3], y[4];
    const Eigen::Matrix2d A = sys.closed_loop_drift(y[0]);
    const Eigen::Vector2d gain = P * sys.B0 + sys.N0;
    const Eigen::Matrix2d minus_dP =
        A.transpose() * P + P * A - gain * (sys.B0.transpose() * P + sys.N0.transpose()) + sys.Q0;
    return State{minor_rhs(p, y[0]), -minus_dP(0, 0), -minus_dP(0, 1), -minus_dP(1, 0), -minus_dP(1, 1)};
  };
  const State terminal{-p.c, sys.G0(0, 0), sys.G0(0, 1), sys.G0(1, 0), sys.G0(1, 1)};
  const auto ys = integrate_backward<5>(rhs, terminal, out.grid, opts.blowup_bound);

  std::vector<double> phi_recomputed;
  phi_recomputed.reserve(ys.size());
  out.P.reserve(ys.size());
  out.implied_phi0.reserve(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const State& y = ys[k];
    Eigen::Matrix2d P;
    P << y[1], y[2], y[3], y[4];
    const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
    if (std::abs(P(0, 1) - P(1, 0)) > kSymmetryTol * scale) {
      throw NumericalError("oracle Riccati lost symmetry at t=" + std::to_string(out.grid[k]));
    }
    phi_recomputed.push_back(y[0]);
    out.P.push_back(P);
    out.implied_phi0.push_back(-P(0, 0));
  }
  check_phi_matches(phi, out.grid, phi_recomputed);
  return out;
}

RiccatiSolution solve_strategy(const MarketParams& p, StrategyMode mode, const RiccatiOptions& opts) {
  RiccatiSolution sol;
  sol.mode = mode;
  const CoefficientPath phi = solve_minor_phi(p, opts);
  sol.grid = phi.grid;
  sol.phi = phi.values;
  switch (mode) {
    case StrategyMode::TheoremAsPublished:
      sol.phi0 = solve_major_phi0(p, phi, Phi0Form::TheoremAsPublished, opts).values;
      break;
    case StrategyMode::DerivationConsistent:
      sol.phi0 = solve_major_phi0(p, phi, Phi0Form::DerivationConsistent, opts).values;
      break;
    case StrategyMode::MatrixOracle:
      sol.phi0 = solve_major_lqr_oracle(build_extended_system(p), phi, opts).implied_phi0;
      break;
  }
  return sol;
}

}  // namespace interbank
