#include "interbank/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "interbank/errors.hpp"

namespace interbank {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

MarketParams no_major(const MarketParams& p) { return with_major_size(p, 0.0); }

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string optional_cell(const std::optional<Estimate>& e, bool se) {
  if (!e) return "";
  return format_number(se ? e->se : e->value);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

SweepRow run_scenario(const MarketParams& p, double value, bool has_major, const SimSettings& s) {
  validate_params(p);
  SweepRow row;
  row.value = value;
  row.has_major = has_major;
  row.params = p;
  const RiccatiSolution rs = solve_strategy(p, s.mode, s.riccati);
  SimOptions opts;
  opts.workers = s.workers;
  opts.retain_trajectories = 0;
  const PathEnsemble e =
      simulate_finite(p, rs, s.N, SimGrid::make(p.T, s.n_steps), s.n_paths, s.rng, s.mode, opts);
  row.report = estimate_risk_report(e, p.D);
  if (s.loss_histograms) row.loss = loss_distribution(e);
  row.noise_checksum = e.noise_checksum;
  return row;
}

ScenarioSweep sweep_size_G(const MarketParams& base, const std::vector<double>& g_values, const SimSettings& s) {
  ScenarioSweep sweep;
  sweep.parameter = "G";
  sweep.base = base;
  sweep.settings = s;
  sweep.rows.push_back(run_scenario(no_major(base), 0.0, false, s));
  for (double G : g_values) {
    if (G == 0.0) continue;  // the baseline row already covers G = 0
    sweep.rows.push_back(run_scenario(with_major_size(base, G), G, true, s));
  }
  return sweep;
}

ScenarioSweep sweep_friction_a(const MarketParams& base, const std::vector<double>& a_values, const SimSettings& s) {
  ScenarioSweep sweep;
  sweep.parameter = "a";
  sweep.base = base;
  sweep.settings = s;
  for (double a : a_values) {
    const MarketParams with = with_minor_rate(base, a);
    sweep.rows.push_back(run_scenario(no_major(with), a, false, s));
    sweep.rows.push_back(run_scenario(with, a, true, s));
  }
  return sweep;
}

ConvergenceStudy convergence_study(const MarketParams& p, const std::vector<int>& n_list, const SimSettings& s,
                                   std::uint64_t designated_path) {
  validate_params(p);
  if (designated_path >= static_cast<std::uint64_t>(s.n_paths)) {
    throw UnsupportedInput("designated path index exceeds the number of paths");
  }
  const RiccatiSolution rs = solve_strategy(p, s.mode, s.riccati);
  const SimGrid grid = SimGrid::make(p.T, s.n_steps);

  SimOptions opts;
  opts.workers = s.workers;
  opts.retain_trajectories = s.n_paths;
  opts.trajectory_minor_limit = 0;
  // The (x0, x_bar) subsystem does not depend on the representative minors, so one suffices.
  const PathEnsemble lim = simulate_limiting(p, rs, 1, grid, s.n_paths, s.rng, s.mode, opts);

  ConvergenceStudy study;
  study.designated_path = designated_path;
  study.limiting = lim.trajectories[designated_path];
  for (int N : n_list) {
    const PathEnsemble fin = simulate_finite(p, rs, N, grid, s.n_paths, s.rng, s.mode, opts);
    ConvergenceRow row;
    row.N = N;
    row.sup_average.resize(s.n_paths);
    row.sup_market.resize(s.n_paths);
    for (int path = 0; path < s.n_paths; ++path) {
      const Trajectory& f = fin.trajectories[path];
      const Trajectory& l = lim.trajectories[path];
      double sa = 0.0, sm = 0.0;
      for (int k = 0; k <= grid.n_steps; ++k) {
        sa = std::max(sa, std::abs(f.average[k] - l.average[k]));
        sm = std::max(sm, std::abs(f.market[k] - l.market[k]));
      }
      row.sup_average[path] = sa;
      row.sup_market[path] = sm;
    }
    row.median_sup_average = median(row.sup_average);
    row.median_sup_market = median(row.sup_market);
    study.finite.push_back(fin.trajectories[designated_path]);
    study.rows.push_back(std::move(row));
  }
  return study;
}

std::string_view to_string(PanelSet set) { return set == PanelSet::Size ? "size" : "friction"; }

PanelSet parse_panel_set(std::string_view text) {
  if (text == "size") return PanelSet::Size;
  if (text == "friction") return PanelSet::Friction;
  throw ConfigError("unknown panel set '" + std::string(text) + "' (expected size|friction)");
}

std::vector<TrajectoryPanel> export_trajectories(const MarketParams& base, PanelSet set, const SimSettings& s,
                                                 int retained) {
  std::vector<std::pair<std::string, MarketParams>> scenarios;
  if (set == PanelSet::Size) {
    for (double G : {0.1, 0.9}) scenarios.emplace_back("G=" + format_number(G), with_major_size(base, G));
  } else {
    const MarketParams half = with_major_size(base, 0.5);
    for (double a : {1.0, 10.0}) scenarios.emplace_back("a=" + format_number(a), with_minor_rate(half, a));
  }

  SimOptions opts;
  opts.workers = s.workers;
  opts.retain_trajectories = std::min(retained, s.n_paths);
  opts.trajectory_minor_limit = s.N;

  std::vector<TrajectoryPanel> survive, fail;
  for (const auto& [label, p] : scenarios) {
    validate_params(p);
    const RiccatiSolution rs = solve_strategy(p, s.mode, s.riccati);
    const PathEnsemble e = simulate_finite(p, rs, s.N, SimGrid::make(p.T, s.n_steps), s.n_paths, s.rng, s.mode, opts);
    for (bool defaults : {false, true}) {
      const std::string name = label + ",major=" + (defaults ? "defaults" : "survives");
      const auto it = std::find_if(e.trajectories.begin(), e.trajectories.end(), [&](const Trajectory& t) {
        return path_default_indicator(e.major_min[t.path], p.D) == defaults;
      });
      if (it == e.trajectories.end()) {
        throw NoMatchingPath("no retained path matches panel " + name + " among " +
                             std::to_string(e.trajectories.size()) + " retained; retain more trajectories");
      }
      (defaults ? fail : survive).push_back(TrajectoryPanel{name, p, defaults, *it});
    }
  }
  survive.insert(survive.end(), fail.begin(), fail.end());
  return survive;
}

RiccatiTable riccati_table(const MarketParams& p, StrategyMode mode, const RiccatiOptions& opts) {
  validate_params(p);
  const RiccatiSolution rs = solve_strategy(p, mode, opts);
  const CoefficientPath phi = solve_minor_phi(p, opts);
  const OraclePath oracle = solve_major_lqr_oracle(build_extended_system(p), phi, opts);
  RiccatiTable t;
  t.t = rs.grid;
  t.phi = rs.phi;
  t.phi0 = rs.phi0;
  t.oracle_phi0 = oracle.implied_phi0;
  for (std::size_t k = 0; k < rs.grid.size(); ++k) {
    t.minor_reversion.push_back(p.a + p.q - rs.phi[k]);
    t.major_reversion.push_back(p.a0 + p.q0 - rs.phi0[k]);
  }
  return t;
}

std::string risk_csv(const ScenarioSweep& sweep) {
  std::ostringstream out;
  out << sweep.parameter
      << ",has_major,p_i,p_i|MS,p_i|MD,p_SE,p_SE|MS,p_SE|MD,p_0,"
         "se_p_i,se_p_i|MS,se_p_i|MD,se_p_SE,se_p_SE|MS,se_p_SE|MD,se_p_0,n_paths,n_major_default,noise_checksum\n";
  for (const SweepRow& row : sweep.rows) {
    const RiskReport& r = row.report;
    // Without a major bank there is nothing to condition on.
    const bool m = row.has_major;
    const std::optional<Estimate> none;
    const std::optional<Estimate> p0 = m ? std::optional<Estimate>(r.p0) : none;
    out << format_number(row.value) << ',' << (m ? 1 : 0) << ',' << format_number(r.pi.value) << ','
        << optional_cell(m ? r.pi_given_MS : none, false) << ',' << optional_cell(m ? r.pi_given_MD : none, false)
        << ',' << format_number(r.pse.value) << ',' << optional_cell(m ? r.pse_given_MS : none, false) << ','
        << optional_cell(m ? r.pse_given_MD : none, false) << ',' << optional_cell(p0, false) << ','
        << format_number(r.pi.se) << ',' << optional_cell(m ? r.pi_given_MS : none, true) << ','
        << optional_cell(m ? r.pi_given_MD : none, true) << ',' << format_number(r.pse.se) << ','
        << optional_cell(m ? r.pse_given_MS : none, true) << ',' << optional_cell(m ? r.pse_given_MD : none, true)
        << ',' << optional_cell(p0, true) << ',' << r.n_paths << ','
        << (m ? std::to_string(r.n_major_default) : std::string()) << ','
        << hex64(row.noise_checksum) << '\n';
  }
  return out.str();
}

std::string loss_csv(const ScenarioSweep& sweep) {
  std::ostringstream out;
  out << sweep.parameter << ",has_major,variant,k,mass\n";
  for (const SweepRow& row : sweep.rows) {
    if (!row.loss) continue;
    auto emit = [&](const char* variant, const std::vector<double>& mass) {
      for (std::size_t k = 0; k < mass.size(); ++k) {
        out << format_number(row.value) << ',' << (row.has_major ? 1 : 0) << ',' << variant << ',' << k << ','
            << format_number(mass[k]) << '\n';
      }
    };
    emit("total", row.loss->total);
    if (row.has_major) {
      if (row.loss->given_MS) emit("MS", *row.loss->given_MS);
      if (row.loss->given_MD) emit("MD", *row.loss->given_MD);
    }
  }
  return out.str();
}

std::string trajectory_csv(const Trajectory& t, const SimGrid& grid, const std::string& label) {
  std::ostringstream out;
  const std::string prefix = label.empty() ? "" : label + ",";
  auto emit = [&](const std::string& id, std::span<const double> xs) {
    for (int k = 0; k <= t.n_steps; ++k) {
      out << prefix << t.path << ',' << format_number(grid.time(k)) << ',' << id << ',' << format_number(xs[k])
          << '\n';
    }
  };
  emit("major", t.major);
  emit("average", t.average);
  emit("market", t.market);
  for (int i = 0; i < t.n_minors; ++i) emit(std::to_string(i + 1), t.minor_path(i));
  return out.str();
}

std::string trajectory_csv(const std::vector<TrajectoryPanel>& panels) {
  std::string out = "panel,path,t,bank_id,x\n";
  for (const TrajectoryPanel& panel : panels) {
    const SimGrid grid = SimGrid::make(panel.params.T, panel.trajectory.n_steps);
    out += trajectory_csv(panel.trajectory, grid, '"' + panel.name + '"');
  }
  return out;
}

std::string riccati_csv(const RiccatiTable& table) {
  std::ostringstream out;
  out << "t,phi,phi0,implied_phi0_oracle,minor_reversion,major_reversion\n";
  for (std::size_t k = 0; k < table.t.size(); ++k) {
    out << format_number(table.t[k]) << ',' << format_number(table.phi[k]) << ',' << format_number(table.phi0[k])
        << ',' << format_number(table.oracle_phi0[k]) << ',' << format_number(table.minor_reversion[k]) << ','
        << format_number(table.major_reversion[k]) << '\n';
  }
  return out.str();
}

std::string convergence_csv(const ConvergenceStudy& study) {
  std::ostringstream out;
  out << "N,median_sup_average,median_sup_market\n";
  for (const ConvergenceRow& row : study.rows) {
    out << row.N << ',' << format_number(row.median_sup_average) << ',' << format_number(row.median_sup_market)
        << '\n';
  }
  return out.str();
}

}  // namespace interbank
