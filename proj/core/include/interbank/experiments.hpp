#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "interbank/model.hpp"
#include "interbank/riccati.hpp"
#include "interbank/risk.hpp"
#include "interbank/rng.hpp"
#include "interbank/simulate.hpp"

namespace interbank {

struct SimSettings {
  int N = 10;
  int n_paths = 50000;
  int n_steps = 100;
  int workers = 1;
  StrategyMode mode = StrategyMode::DerivationConsistent;
  RiccatiOptions riccati;
  RngPolicy rng;
  bool loss_histograms = false;
};

struct SweepRow {
  double value = 0.0;      // G or a
  bool has_major = true;   // false for the G = 0, F = 1 baseline
  MarketParams params;
  RiskReport report;
  std::optional<LossHistogram> loss;
  std::uint64_t noise_checksum = 0;
};

struct ScenarioSweep {
  std::string parameter;  // "G" or "a"
  MarketParams base;
  SimSettings settings;
  std::vector<SweepRow> rows;
};

/// Rows in order: the no-major baseline (G = 0), then one row per G with
/// (a0, F) re-derived from clearing. All rows share the path increments.
ScenarioSweep sweep_size_G(const MarketParams& base, const std::vector<double>& g_values, const SimSettings& s);

/// For every a: a no-major row (G = 0) followed by a with-major row at the
/// base G, both with a0 = a * G.
ScenarioSweep sweep_friction_a(const MarketParams& base, const std::vector<double>& a_values, const SimSettings& s);

/// Simulate one validated scenario and summarise it.
SweepRow run_scenario(const MarketParams& p, double value, bool has_major, const SimSettings& s);

struct ConvergenceRow {
  int N = 0;
  double median_sup_average = 0.0;  // median over paths of sup_t |x^(N) - x_bar|
  double median_sup_market = 0.0;   // same for the market states
  std::vector<double> sup_average;  // per path
  std::vector<double> sup_market;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  /// Paired path for plotting: the limiting trajectory and one finite
  /// trajectory per N, all on the same x0 increments.
  std::uint64_t designated_path = 0;
  Trajectory limiting;
  std::vector<Trajectory> finite;
};

ConvergenceStudy convergence_study(const MarketParams& p, const std::vector<int>& n_list, const SimSettings& s,
                                   std::uint64_t designated_path = 0);

/// Trajectory panels comparing two scenarios, each conditioned on the major
/// bank surviving or defaulting. Size: G = 0.1 vs 0.9 at the base a.
/// Friction: a = 1 vs 10 at F = G = 0.5.
enum class PanelSet { Size, Friction };

struct TrajectoryPanel {
  std::string name;  // e.g. "G=0.1,major=survives"
  MarketParams params;
  bool major_defaults = false;
  Trajectory trajectory;
};

/// Simulates each scenario with `retained` full trajectories and picks, per
/// panel, the lowest-index retained path matching the condition. Throws
/// NoMatchingPath when none does.
std::vector<TrajectoryPanel> export_trajectories(const MarketParams& base, PanelSet set, const SimSettings& s,
                                                 int retained = 256);

std::string_view to_string(PanelSet set);
PanelSet parse_panel_set(std::string_view text);

/// Coefficient table on the Riccati grid: phi, phi0 for the selected mode, the
/// oracle phi0, and the effective mean-reversion levels.
struct RiccatiTable {
  std::vector<double> t;
  std::vector<double> phi;
  std::vector<double> phi0;
  std::vector<double> oracle_phi0;
  std::vector<double> minor_reversion;  // a + q - phi
  std::vector<double> major_reversion;  // a0 + q0 - phi0
};

RiccatiTable riccati_table(const MarketParams& p, StrategyMode mode, const RiccatiOptions& opts = {});

// CSV writers. Numbers use the shortest round-trip representation, so equal
// inputs give identical bytes.
std::string risk_csv(const ScenarioSweep& sweep);
std::string loss_csv(const ScenarioSweep& sweep);
std::string trajectory_csv(const std::vector<TrajectoryPanel>& panels);
std::string trajectory_csv(const Trajectory& t, const SimGrid& grid, const std::string& label = {});
std::string riccati_csv(const RiccatiTable& table);
std::string convergence_csv(const ConvergenceStudy& study);

std::string format_number(double v);

}  // namespace interbank
