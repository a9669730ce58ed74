#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "interbank/model.hpp"

namespace interbank {

/// Which published or derived form of the equilibrium strategies is in force.
///
/// TheoremAsPublished runs the closed-form statements verbatim: major gain
/// (q - phi0) toward F*x_avg, mean-field rate (a + q + phi), and the phi0 ODE with
/// a (a + q - phi)*G*phi0 coupling. DerivationConsistent uses the forms forced by
/// the extended-state algebra: major gain (q0 - phi0) toward x_avg, mean-field
/// rate (a + q - phi), and the phi0 ODE obtained by reducing the 2x2 matrix
/// Riccati equation. MatrixOracle uses the DerivationConsistent feedback laws but
/// takes phi0 from the matrix Riccati solution itself.
enum class StrategyMode { TheoremAsPublished, DerivationConsistent, MatrixOracle };

std::string_view to_string(StrategyMode mode);
/// Accepts theorem | derivation | oracle. Throws ConfigError otherwise.
StrategyMode parse_mode(std::string_view text);

/// Scalar ODE forms for phi0. AppendixPrinted is the closing-formula variant with
/// a (a + q + phi) coupling; it has no StrategyMode of its own and only appears in
/// mode comparisons.
enum class Phi0Form { TheoremAsPublished, AppendixPrinted, DerivationConsistent };

std::string_view to_string(Phi0Form form);

struct RiccatiOptions {
  int steps = 1000;
  double blowup_bound = 1e6;
};

/// A scalar coefficient sampled on a uniform grid covering [0, T].
struct CoefficientPath {
  std::vector<double> grid;
  std::vector<double> values;
};

struct RiccatiSolution {
  std::vector<double> grid;
  std::vector<double> phi;
  std::vector<double> phi0;
  StrategyMode mode = StrategyMode::DerivationConsistent;

  double horizon() const { return grid.back(); }
  /// Linear interpolation; clamps outside [0, T].
  double phi_at(double t) const;
  double phi0_at(double t) const;
};

/// Matrices of the extended-state formulation. The major bank sees the state
/// (x0, x_avg); a representative minor sees (xi, x0, x_avg).
struct ExtendedSystem {
  MarketParams params;

  Eigen::Matrix2d A0_tilde;
  Eigen::Vector2d B0;
  Eigen::Vector2d B0_tilde;
  Eigen::Matrix2d Sigma0;
  Eigen::Matrix2d Q0;
  Eigen::Vector2d N0;
  Eigen::Matrix2d G0;

  Eigen::Vector3d B;
  Eigen::Vector3d B_tilde;
  Eigen::Matrix3d Sigma;
  Eigen::Matrix3d Q;
  Eigen::Vector3d N;
  Eigen::Matrix3d Q_hat;
  Eigen::Vector3d K;

  /// Major-side drift once the mean field of minor controls is fed back:
  /// A0_tilde + B0_tilde * (q - phi) * [G, F - 1].
  Eigen::Matrix2d closed_loop_drift(double phi_t) const;
  /// Minor-side drift with the major playing (q0 - phi0)(x_avg - x0); the mean
  /// field of controls still enters separately through B_tilde.
  Eigen::Matrix3d minor_drift(double phi0_t) const;
};

ExtendedSystem build_extended_system(const MarketParams& p);

struct OraclePath {
  std::vector<double> grid;
  std::vector<Eigen::Matrix2d> P;
  std::vector<double> implied_phi0;
};

/// phi' = 2(a+q)phi - phi^2 + eps - q^2, phi(T) = -c, integrated backward with RK4.
CoefficientPath solve_minor_phi(const MarketParams& p, const RiccatiOptions& opts = {});

/// phi0 under the selected scalar form, phi0(T) = -c0. `phi` must come from
/// solve_minor_phi with the same parameters and step count; otherwise a
/// NumericalError reports the grid mismatch.
CoefficientPath solve_major_phi0(const MarketParams& p, const CoefficientPath& phi, Phi0Form form,
                                 const RiccatiOptions& opts = {});

/// Finite-horizon LQR with state-control cross weight for the major's extended
/// state:  -P' = A^T P + P A - (P B0 + N0)(B0^T P + N0^T) + Q0,  P(T) = G0,
/// where A is closed_loop_drift(phi(t)). implied_phi0 = -P(0,0).
OraclePath solve_major_lqr_oracle(const ExtendedSystem& sys, const CoefficientPath& phi,
                                  const RiccatiOptions& opts = {});

/// phi and phi0 for the given mode on a common grid.
RiccatiSolution solve_strategy(const MarketParams& p, StrategyMode mode, const RiccatiOptions& opts = {});

/// (q - phi)(F*x_avg + G*x0 - xi).
inline double minor_control(double phi_t, double x_avg, double x0, double xi, const MarketParams& p) {
  return (p.q - phi_t) * (market_state(x_avg, x0, p.F, p.G) - xi);
}

inline double major_control(double phi0_t, double x_avg, double x0, const MarketParams& p, StrategyMode mode) {
  if (mode == StrategyMode::TheoremAsPublished) return (p.q - phi0_t) * (p.F * x_avg - x0);
  return (p.q0 - phi0_t) * (x_avg - x0);
}

/// d x_avg / dt under the equilibrium minor strategies.
inline double meanfield_drift(double phi_t, double x_avg, double x0, const MarketParams& p, StrategyMode mode) {
  const double gap = (p.F - 1.0) * x_avg + p.G * x0;
  if (mode == StrategyMode::TheoremAsPublished) return (p.a + p.q + phi_t) * gap;
  return (p.a + p.q - phi_t) * gap;
}

}  // namespace interbank
