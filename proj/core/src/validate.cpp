#include "interbank/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "interbank/cost.hpp"
#include "interbank/errors.hpp"

namespace interbank {

namespace {

std::vector<double> costs_of(const PathEnsemble& e, const BankSelector& who) {
  if (!e.has_costs()) throw UnsupportedInput("ensemble was simulated without retained costs");
  if (who.target == Perturbation::Target::Major) return e.major_cost;
  if (who.minor_index < 0 || who.minor_index >= e.n_minors) throw UnsupportedInput("minor index out of range");
  std::vector<double> out(e.n_paths);
  for (int path = 0; path < e.n_paths; ++path) {
    out[path] = e.minor_cost[static_cast<std::size_t>(path) * e.n_minors + who.minor_index];
  }
  return out;
}

CostEstimate mean_se(const std::vector<double>& v) {
  CostEstimate est;
  est.n_paths = static_cast<int>(v.size());
  if (v.empty()) return est;
  double sum = 0.0;
  for (double x : v) sum += x;
  est.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - est.mean) * (x - est.mean);
    est.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return est;
}

SimOptions cost_options(const ValidationSettings& s) {
  SimOptions opts;
  opts.workers = s.workers;
  opts.retain_trajectories = 0;
  opts.retain_costs = true;
  return opts;
}

void check_spec(const PerturbationSpec& spec, const SimGrid& grid) {
  if (std::find(spec.deltas.begin(), spec.deltas.end(), 0.0) == spec.deltas.end()) {
    throw UnsupportedInput("perturbation magnitudes must include 0");
  }
  if (!spec.own_feedback) {
    if (spec.direction.size() != static_cast<std::size_t>(grid.n_steps) + 1) {
      throw UnsupportedInput("perturbation direction must have one value per grid point");
    }
    for (double w : spec.direction) {
      if (!std::isfinite(w)) throw UnsupportedInput("perturbation direction must be finite");
    }
  }
}

// Least squares for gap = kappa d^2 + beta d (no intercept, gap(0) = 0).
void fit_quadratic(BestResponseResult& r) {
  double s44 = 0.0, s33 = 0.0, s22 = 0.0, sg2 = 0.0, sg1 = 0.0;
  for (const GapPoint& pt : r.points) {
    const double d = pt.delta;
    s44 += d * d * d * d;
    s33 += d * d * d;
    s22 += d * d;
    sg2 += pt.gap * d * d;
    sg1 += pt.gap * d;
  }
  const double det = s44 * s22 - s33 * s33;
  if (std::abs(det) < 1e-300) {
    // A single nonzero |delta|: fall back to the curvature alone.
    r.curvature = s44 > 0.0 ? sg2 / s44 : 0.0;
    r.slope = 0.0;
    return;
  }
  r.curvature = (sg2 * s22 - sg1 * s33) / det;
  r.slope = (s44 * sg1 - s33 * sg2) / det;
}

// `costs` holds the per-path costs for each delta, in the order of r.points.
// The +/- comparison is paired path by path: gap(d) and gap(-d) share the
// unperturbed run, so their errors are strongly anti-correlated.
void summarize(BestResponseResult& r, const std::vector<std::vector<double>>& costs) {
  fit_quadratic(r);
  r.nonnegative = std::all_of(r.points.begin(), r.points.end(),
                              [](const GapPoint& pt) { return pt.gap >= -2.0 * pt.gap_se; });
  r.convex = r.curvature >= 0.0;
  r.worst_asymmetry_z = 0.0;
  r.even = true;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    if (r.points[i].delta <= 0.0) continue;
    for (std::size_t j = 0; j < r.points.size(); ++j) {
      if (r.points[j].delta != -r.points[i].delta) continue;
      std::vector<double> diff(costs[i].size());
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = costs[i][k] - costs[j][k];
      const CostEstimate d = mean_se(diff);
      const double a = std::abs(d.mean);
      const double z = d.se > 0.0 ? a / d.se : (a > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      r.worst_asymmetry_z = std::max(r.worst_asymmetry_z, z);
      if (z > 2.0) r.even = false;
    }
  }
}

}  // namespace

std::vector<double> constant_direction(const SimGrid& grid, double level) {
  return std::vector<double>(grid.n_steps + 1, level);
}

std::vector<double> bump_direction(const SimGrid& grid, double t_begin, double t_end) {
  std::vector<double> w(grid.n_steps + 1, 0.0);
  for (int k = 0; k <= grid.n_steps; ++k) {
    const double t = grid.time(k);
    if (t >= t_begin && t < t_end) w[k] = 1.0;
  }
  return w;
}

std::vector<double> random_step_direction(const SimGrid& grid, std::mt19937_64& engine, int pieces) {
  if (pieces < 1) throw UnsupportedInput("random step direction needs at least one piece");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> levels(pieces);
  for (double& l : levels) l = normal(engine);
  std::vector<double> w(grid.n_steps + 1);
  for (int k = 0; k <= grid.n_steps; ++k) {
    const int piece = std::min(pieces - 1, k * pieces / (grid.n_steps + 1));
    w[k] = levels[piece];
  }
  return w;
}

std::vector<PerturbationSpec> seeded_directions(const SimGrid& grid, const RngPolicy& rng, std::uint64_t tag,
                                                int count, BankSelector who, const std::vector<double>& deltas) {
  auto engine = rng.auxiliary_engine(tag);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PerturbationSpec> specs;
  for (int j = 0; j < count; ++j) {
    PerturbationSpec spec;
    spec.who = who;
    spec.deltas = deltas;
    switch (j % 3) {
      case 0: {
        const double sign = unit(engine) < 0.5 ? -1.0 : 1.0;
        spec.direction = constant_direction(grid, sign);
        spec.label = "constant" + std::to_string(j);
        break;
      }
      case 1: {
        const double a = unit(engine) * 0.75 * grid.T;
        const double b = a + (0.1 + 0.15 * unit(engine)) * grid.T;
        spec.direction = bump_direction(grid, a, b);
        spec.label = "bump" + std::to_string(j);
        break;
      }
      default:
        spec.direction = random_step_direction(grid, engine);
        spec.label = "steps" + std::to_string(j);
        break;
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

CostEstimate evaluate_cost(const PathEnsemble& e, const BankSelector& who, const MarketParams& p) {
  if (e.kind != PopulationKind::Finite) throw UnsupportedInput("costs are only defined for the finite market");
  if (e.threshold != p.D) throw UnsupportedInput("ensemble was simulated with different parameters");
  return mean_se(costs_of(e, who));
}

double trajectory_cost(const Trajectory& t, const BankSelector& who, const MarketParams& p, double dt) {
  const std::size_t len = static_cast<std::size_t>(t.n_steps) + 1;
  if (t.major_control.size() != len) throw UnsupportedInput("trajectory was stored without controls");
  std::vector<double> gap(len);
  if (who.target == Perturbation::Target::Major) {
    for (std::size_t k = 0; k < len; ++k) gap[k] = t.average[k] - t.major[k];
    return path_cost(t.major_control, gap, dt, p.q0, p.eps0, p.c0).total();
  }
  if (who.minor_index < 0 || who.minor_index >= t.n_minors) {
    throw UnsupportedInput("minor bank was not stored on this trajectory");
  }
  const auto x = t.minor_path(who.minor_index);
  const auto u = std::span<const double>(t.minor_controls).subspan(who.minor_index * len, len);
  for (std::size_t k = 0; k < len; ++k) gap[k] = t.market[k] - x[k];
  return path_cost(u, gap, dt, p.q, p.eps, p.c).total();
}

std::vector<BestResponseResult> best_response_gaps(const MarketParams& p, const RiccatiSolution& rs,
                                                   StrategyMode mode, const std::vector<PerturbationSpec>& specs,
                                                   const ValidationSettings& s) {
  const SimGrid grid = SimGrid::make(p.T, s.n_steps);
  for (const auto& spec : specs) check_spec(spec, grid);

  const SimOptions base_opts = cost_options(s);
  const PathEnsemble base = simulate_finite(p, rs, s.N, grid, s.n_paths, s.rng, mode, base_opts);

  std::vector<BestResponseResult> results;
  for (const PerturbationSpec& spec : specs) {
    BestResponseResult r;
    r.label = spec.label;
    r.who = spec.who;
    const std::vector<double> j0 = costs_of(base, spec.who);
    const CostEstimate c0 = mean_se(j0);
    std::vector<std::vector<double>> costs;
    for (double delta : spec.deltas) {
      GapPoint pt;
      pt.delta = delta;
      if (delta == 0.0) {
        pt.cost = c0.mean;
        pt.cost_se = c0.se;
        r.points.push_back(pt);
        costs.push_back(j0);
        continue;
      }
      SimOptions opts = base_opts;
      Perturbation pert;
      pert.target = spec.who.target;
      pert.minor_index = spec.who.minor_index;
      pert.delta = delta;
      pert.direction = spec.direction;
      pert.scale_own_feedback = spec.own_feedback;
      opts.perturbation = std::move(pert);
      const PathEnsemble dev = simulate_finite(p, rs, s.N, grid, s.n_paths, s.rng, mode, opts);
      const std::vector<double> j = costs_of(dev, spec.who);
      std::vector<double> diff(j.size());
      for (std::size_t i = 0; i < j.size(); ++i) diff[i] = j[i] - j0[i];
      const CostEstimate cj = mean_se(j);
      const CostEstimate g = mean_se(diff);
      pt.cost = cj.mean;
      pt.cost_se = cj.se;
      pt.gap = g.mean;
      pt.gap_se = g.se;
      r.points.push_back(pt);
      costs.push_back(std::move(j));
    }
    summarize(r, costs);
    results.push_back(std::move(r));
  }
  return results;
}

BestResponseResult best_response_gap(const MarketParams& p, const RiccatiSolution& rs, StrategyMode mode,
                                     const PerturbationSpec& spec, const ValidationSettings& s) {
  return best_response_gaps(p, rs, mode, {spec}, s).front();
}

MeasuredEpsilon measured_epsilon(const std::vector<BestResponseResult>& results) {
  MeasuredEpsilon eps;
  double worst = 0.0;
  for (const auto& r : results) {
    for (const auto& pt : r.points) {
      if (pt.gap < worst) {
        worst = pt.gap;
        eps.se = pt.gap_se;
        eps.label = r.label;
        eps.delta = pt.delta;
      }
    }
  }
  eps.epsilon = worst < 0.0 ? -worst : 0.0;
  return eps;
}

ModeComparison mode_comparison(const MarketParams& p, const ValidationSettings& s,
                               const std::vector<double>& deltas) {
  validate_params(p);
  ModeComparison out;
  out.params = p;

  const CoefficientPath phi = solve_minor_phi(p, s.riccati);
  out.grid = phi.grid;
  for (Phi0Form form : {Phi0Form::TheoremAsPublished, Phi0Form::AppendixPrinted, Phi0Form::DerivationConsistent}) {
    out.phi0.emplace_back(std::string(to_string(form)), solve_major_phi0(p, phi, form, s.riccati).values);
  }
  out.phi0.emplace_back("oracle", solve_major_lqr_oracle(build_extended_system(p), phi, s.riccati).implied_phi0);
  for (std::size_t i = 0; i < out.phi0.size(); ++i) {
    for (std::size_t j = i + 1; j < out.phi0.size(); ++j) {
      double m = 0.0;
      for (std::size_t k = 0; k < out.grid.size(); ++k) {
        m = std::max(m, std::abs(out.phi0[i].second[k] - out.phi0[j].second[k]));
      }
      out.divergence.push_back({out.phi0[i].first, out.phi0[j].first, m});
    }
  }

  const SimGrid grid = SimGrid::make(p.T, s.n_steps);
  std::vector<PerturbationSpec> specs;
  {
    PerturbationSpec c{BankSelector::major(), "constant", constant_direction(grid), false, deltas};
    PerturbationSpec b{BankSelector::major(), "bump", bump_direction(grid, 0.25 * p.T, 0.5 * p.T), false, deltas};
    PerturbationSpec f{BankSelector::major(), "feedback_scale", {}, true, deltas};
    specs = {c, b, f};
  }
  double best = std::numeric_limits<double>::infinity();
  for (StrategyMode mode :
       {StrategyMode::TheoremAsPublished, StrategyMode::DerivationConsistent, StrategyMode::MatrixOracle}) {
    ModeGapSummary summary;
    summary.mode = mode;
    const RiccatiSolution rs = solve_strategy(p, mode, s.riccati);
    summary.major_gaps = best_response_gaps(p, rs, mode, specs, s);
    summary.epsilon = measured_epsilon(summary.major_gaps);
    // Ties keep the earlier mode, so the choice is deterministic.
    if (summary.epsilon.epsilon < best) {
      best = summary.epsilon.epsilon;
      out.best_mode = mode;
    }
    out.modes.push_back(std::move(summary));
  }
  return out;
}

}  // namespace interbank
