#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "interbank/experiments.hpp"
#include "interbank/simulate.hpp"

namespace interbank {

// Equilibrium checks by unilateral deviation. Every deviation is simulated on
// the same path increments as the unperturbed run, so cost differences are
// paired path by path.

struct BankSelector {
  Perturbation::Target target = Perturbation::Target::Minor;
  int minor_index = 0;

  static BankSelector major() { return {Perturbation::Target::Major, 0}; }
  static BankSelector minor(int i) { return {Perturbation::Target::Minor, i}; }
};

struct PerturbationSpec {
  BankSelector who;
  std::string label;
  /// One value per simulation grid point. Ignored with own_feedback.
  std::vector<double> direction;
  /// Deviate along -u*, i.e. play (1 - delta) times the equilibrium feedback.
  bool own_feedback = false;
  /// Must contain 0.
  std::vector<double> deltas;
};

std::vector<double> constant_direction(const SimGrid& grid, double level = 1.0);
/// 1 on [t_begin, t_end), 0 elsewhere.
std::vector<double> bump_direction(const SimGrid& grid, double t_begin, double t_end);
/// Piecewise constant on `pieces` equal sub-intervals with N(0,1) levels.
std::vector<double> random_step_direction(const SimGrid& grid, std::mt19937_64& engine, int pieces = 5);

/// `count` seeded directions cycling through constant (random sign), bump
/// (random window) and random steps. Equal (rng, tag, count) gives equal output.
std::vector<PerturbationSpec> seeded_directions(const SimGrid& grid, const RngPolicy& rng, std::uint64_t tag,
                                                int count, BankSelector who, const std::vector<double>& deltas);

struct CostEstimate {
  double mean = 0.0;
  double se = 0.0;
  int n_paths = 0;
};

/// Mean and standard error of the selected bank's realized cost. Requires an
/// ensemble simulated with retain_costs.
CostEstimate evaluate_cost(const PathEnsemble& e, const BankSelector& who, const MarketParams& p);

/// Recomputes one bank's cost on a retained trajectory from its stored states
/// and controls (trapezoidal rule plus terminal cost).
double trajectory_cost(const Trajectory& t, const BankSelector& who, const MarketParams& p, double dt);

struct GapPoint {
  double delta = 0.0;
  double cost = 0.0;     // J(delta)
  double cost_se = 0.0;
  double gap = 0.0;      // mean of J(delta) - J(0) over paired paths
  double gap_se = 0.0;
};

struct BestResponseResult {
  std::string label;
  BankSelector who;
  std::vector<GapPoint> points;  // in the order of spec.deltas
  double curvature = 0.0;        // kappa in gap ~ kappa delta^2 + beta delta
  double slope = 0.0;            // beta
  bool nonnegative = true;       // every gap >= -2 SE
  bool convex = true;            // kappa >= 0
  /// Largest |mean(J(d) - J(-d))| / SE over the +/- pairs, paired path by path.
  double worst_asymmetry_z = 0.0;
  bool even = true;              // every +/- pair within 2 SE
};

struct ValidationSettings {
  int N = 10;
  int n_paths = 5000;
  int n_steps = 100;
  int workers = 1;
  RiccatiOptions riccati;
  RngPolicy rng;
};

BestResponseResult best_response_gap(const MarketParams& p, const RiccatiSolution& rs, StrategyMode mode,
                                     const PerturbationSpec& spec, const ValidationSettings& s);

/// Several specs against one shared unperturbed run.
std::vector<BestResponseResult> best_response_gaps(const MarketParams& p, const RiccatiSolution& rs,
                                                   StrategyMode mode, const std::vector<PerturbationSpec>& specs,
                                                   const ValidationSettings& s);

/// Worst negative gap across results: max(0, -min gap), with that gap's SE.
struct MeasuredEpsilon {
  double epsilon = 0.0;
  double se = 0.0;
  std::string label;
  double delta = 0.0;
};
MeasuredEpsilon measured_epsilon(const std::vector<BestResponseResult>& results);

struct Phi0Divergence {
  std::string first;
  std::string second;
  double max_abs_diff = 0.0;
};

struct ModeGapSummary {
  StrategyMode mode = StrategyMode::DerivationConsistent;
  std::vector<BestResponseResult> major_gaps;
  MeasuredEpsilon epsilon;
};

struct ModeComparison {
  MarketParams params;
  std::vector<double> grid;
  /// Keyed "theorem", "appendix", "derivation", "oracle".
  std::vector<std::pair<std::string, std::vector<double>>> phi0;
  std::vector<Phi0Divergence> divergence;  // all pairs
  std::vector<ModeGapSummary> modes;
  StrategyMode best_mode = StrategyMode::DerivationConsistent;
};

ModeComparison mode_comparison(const MarketParams& p, const ValidationSettings& s,
                               const std::vector<double>& deltas = {-0.2, -0.1, 0.0, 0.1, 0.2});

}  // namespace interbank
