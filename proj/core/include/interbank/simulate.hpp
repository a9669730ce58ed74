#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "interbank/model.hpp"
#include "interbank/riccati.hpp"
#include "interbank/rng.hpp"

namespace interbank {

struct SimGrid {
  int n_steps = 100;
  double T = 1.0;

  static SimGrid make(double T, int n_steps);
  double dt() const { return T / static_cast<double>(n_steps); }
  double time(int k) const { return k == n_steps ? T : T * static_cast<double>(k) / static_cast<double>(n_steps); }
};

enum class PopulationKind { Finite, Limiting };

/// Unilateral deviation by one bank. The target plays u* + delta * w_k, where w is
/// `direction` (one value per grid point) or, with scale_own_feedback, w = -u*.
struct Perturbation {
  enum class Target { Major, Minor };
  Target target = Target::Minor;
  int minor_index = 0;
  double delta = 0.0;
  std::vector<double> direction;
  bool scale_own_feedback = false;
};

struct SimOptions {
  int workers = 1;
  /// Paths [0, retain_trajectories) keep full trajectories.
  int retain_trajectories = 16;
  /// At most this many minor banks are stored per retained trajectory.
  int trajectory_minor_limit = 64;
  /// Accumulate every bank's realized cost along each path.
  bool retain_costs = false;
  std::optional<Perturbation> perturbation;
};

struct Trajectory {
  std::uint64_t path = 0;
  int n_steps = 0;
  int n_minors = 0;                    // minors actually stored
  std::vector<double> major;           // n_steps + 1
  std::vector<double> average;         // x^(N) (finite) or x_bar (limiting)
  std::vector<double> market;          // F * average + G * major
  std::vector<double> minors;          // bank-major, n_minors * (n_steps + 1)
  std::vector<double> major_control;   // only with retain_costs
  std::vector<double> minor_controls;  // only with retain_costs, same layout as minors

  double minor(int i, int k) const { return minors[static_cast<std::size_t>(i) * (n_steps + 1) + k]; }
  std::span<const double> minor_path(int i) const {
    return std::span<const double>(minors).subspan(static_cast<std::size_t>(i) * (n_steps + 1), n_steps + 1);
  }
};

/// Per-path summaries of one scenario. Minima are taken over grid points,
/// including t = 0.
struct PathEnsemble {
  PopulationKind kind = PopulationKind::Finite;
  int n_paths = 0;
  int n_minors = 0;
  SimGrid grid;
  double threshold = 0.0;  // D at simulation time
  StrategyMode mode = StrategyMode::DerivationConsistent;

  std::vector<double> major_min;
  std::vector<double> market_min;
  std::vector<double> minor_min;     // n_paths * n_minors, path-major
  std::vector<int> minor_defaults;   // finite only: minors with minimum <= threshold

  std::vector<double> major_cost;    // with retain_costs: one per path
  std::vector<double> minor_cost;    // with retain_costs: n_paths * n_minors

  std::vector<Trajectory> trajectories;
  std::uint64_t noise_checksum = 0;

  double minor_minimum(int path, int i) const {
    return minor_min[static_cast<std::size_t>(path) * n_minors + i];
  }
  bool has_costs() const { return !major_cost.empty(); }
};

/// x + (drift + control) * dt + sigma * dW, componentwise. dW has variance dt.
inline double euler_step(double x, double drift, double control, double sigma, double dt, double dW) {
  return x + (drift + control) * dt + sigma * dW;
}

/// Vector form; throws SimulationError if a component stops being finite.
void euler_step(std::span<double> state, std::span<const double> drift, std::span<const double> control,
                std::span<const double> sigma, double dt, std::span<const double> dW);

/// One major bank and N minor banks. The major tracks the empirical average
/// x^(N) and every minor tracks F*x^(N) + G*x0, using the limiting phi, phi0.
/// Banks keep trading after crossing the threshold.
PathEnsemble simulate_finite(const MarketParams& p, const RiccatiSolution& rs, int N, const SimGrid& grid,
                             int n_paths, const RngPolicy& rng, StrategyMode mode, const SimOptions& opts = {});

/// Limiting market: the major against the noise-free mean field x_bar, and M
/// representative minors, each with its own Brownian driver, tracking
/// F*x_bar + G*x0. The major's increments are the ones simulate_finite uses
/// for the same path.
PathEnsemble simulate_limiting(const MarketParams& p, const RiccatiSolution& rs, int M, const SimGrid& grid,
                               int n_paths, const RngPolicy& rng, StrategyMode mode, const SimOptions& opts = {});

/// Strategy coefficients sampled at the simulation grid points.
struct SampledCoefficients {
  std::vector<double> phi;
  std::vector<double> phi0;
};
SampledCoefficients sample_coefficients(const RiccatiSolution& rs, const SimGrid& grid);

}  // namespace interbank
