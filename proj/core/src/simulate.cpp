#include "interbank/simulate.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "interbank/cost.hpp"
#include "interbank/errors.hpp"
#include "interbank/parallel.hpp"

namespace interbank {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(const MarketParams& p, const RiccatiSolution& rs, const SimGrid& grid, int banks, int n_paths,
                  StrategyMode mode) {
  if (banks < 1) throw UnsupportedInput("at least one minor bank is required");
  if (n_paths < 1) throw UnsupportedInput("at least one path is required");
  if (grid.n_steps < 1) throw UnsupportedInput("n_steps must be at least 1");
  if (std::abs(grid.T - p.T) > 1e-12 * std::max(1.0, p.T)) {
    throw UnsupportedInput("simulation horizon differs from T");
  }
  if (rs.grid.empty() || rs.grid.front() != 0.0 || std::abs(rs.grid.back() - p.T) > 1e-12 * std::max(1.0, p.T)) {
    throw NumericalError("grid mismatch: Riccati solution does not cover [0, T]");
  }
  if (rs.mode != mode) {
    throw UnsupportedInput("Riccati solution was produced for mode '" + std::string(to_string(rs.mode)) +
                           "', simulation requested '" + std::string(to_string(mode)) + "'");
  }
}

[[noreturn]] void abort_non_finite(std::int64_t path, double t) {
  throw SimulationError("non-finite state on path " + std::to_string(path) + " at t=" + std::to_string(t));
}

std::uint64_t combine_checksums(const std::vector<std::uint64_t>& per_path) {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto v : per_path) {
    h ^= v;
    h *= 1099511628211ULL;
  }
  return h;
}

struct Scratch {
  std::vector<double> noise;
  std::vector<double> x;
  std::vector<double> u;
  std::vector<double> mins;
  std::vector<double> costs;
};

Trajectory make_trajectory(std::uint64_t path, int n_steps, int stored_minors, bool with_controls) {
  Trajectory t;
  t.path = path;
  t.n_steps = n_steps;
  t.n_minors = stored_minors;
  const std::size_t len = static_cast<std::size_t>(n_steps) + 1;
  t.major.resize(len);
  t.average.resize(len);
  t.market.resize(len);
  t.minors.resize(len * stored_minors);
  if (with_controls) {
    t.major_control.resize(len);
    t.minor_controls.resize(len * stored_minors);
  }
  return t;
}

double perturbation_term(const Perturbation& pert, double u_star, int k) {
  const double w = pert.scale_own_feedback ? -u_star : pert.direction[k];
  return pert.delta * w;
}

void check_perturbation(const Perturbation& pert, const SimGrid& grid, int N) {
  if (!pert.scale_own_feedback && pert.direction.size() != static_cast<std::size_t>(grid.n_steps) + 1) {
    throw UnsupportedInput("perturbation direction must have one value per grid point");
  }
  if (pert.target == Perturbation::Target::Minor && (pert.minor_index < 0 || pert.minor_index >= N)) {
    throw UnsupportedInput("perturbed minor index out of range");
  }
}

}  // namespace

SimGrid SimGrid::make(double T, int n_steps) {
  if (n_steps < 1) throw UnsupportedInput("n_steps must be at least 1");
  if (!(T > 0.0)) throw ParameterError("range violation: T > 0 required");
  return SimGrid{n_steps, T};
}

void euler_step(std::span<double> state, std::span<const double> drift, std::span<const double> control,
                std::span<const double> sigma, double dt, std::span<const double> dW) {
  if (drift.size() != state.size() || control.size() != state.size() || sigma.size() != state.size() ||
      dW.size() != state.size()) {
    throw UnsupportedInput("euler_step: mismatched component counts");
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    state[i] = euler_step(state[i], drift[i], control[i], sigma[i], dt, dW[i]);
    if (!std::isfinite(state[i])) {
      throw SimulationError("non-finite state in component " + std::to_string(i));
    }
  }
}

SampledCoefficients sample_coefficients(const RiccatiSolution& rs, const SimGrid& grid) {
  SampledCoefficients c;
  c.phi.resize(grid.n_steps + 1);
  c.phi0.resize(grid.n_steps + 1);
  for (int k = 0; k <= grid.n_steps; ++k) {
    c.phi[k] = rs.phi_at(grid.time(k));
    c.phi0[k] = rs.phi0_at(grid.time(k));
  }
  return c;
}

PathEnsemble simulate_finite(const MarketParams& p, const RiccatiSolution& rs, int N, const SimGrid& grid,
                             int n_paths, const RngPolicy& rng, StrategyMode mode, const SimOptions& opts) {
  check_inputs(p, rs, grid, N, n_paths, mode);
  const Perturbation* pert = opts.perturbation ? &*opts.perturbation : nullptr;
  if (pert) check_perturbation(*pert, grid, N);

  const int n = grid.n_steps;
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  const SampledCoefficients coef = sample_coefficients(rs, grid);
  const bool costs = opts.retain_costs;
  const int retained = std::min(std::max(opts.retain_trajectories, 0), n_paths);
  const int stored_minors = std::min(std::max(opts.trajectory_minor_limit, 0), N);
  const double inv_n = 1.0 / static_cast<double>(N);

  PathEnsemble e;
  e.kind = PopulationKind::Finite;
  e.n_paths = n_paths;
  e.n_minors = N;
  e.grid = grid;
  e.threshold = p.D;
  e.mode = mode;
  e.major_min.resize(n_paths);
  e.market_min.resize(n_paths);
  e.minor_min.resize(static_cast<std::size_t>(n_paths) * N);
  e.minor_defaults.resize(n_paths);
  if (costs) {
    e.major_cost.resize(n_paths);
    e.minor_cost.resize(static_cast<std::size_t>(n_paths) * N);
  }
  e.trajectories.resize(retained);
  std::vector<std::uint64_t> checksums(n_paths);

  parallel_chunks(n_paths, opts.workers, [&](int, std::int64_t begin, std::int64_t end) {
    Scratch s;
    s.noise.resize(static_cast<std::size_t>(N + 1) * n);
    s.x.resize(N);
    s.u.resize(N);
    s.mins.resize(N);
    s.costs.resize(N);

    for (std::int64_t path = begin; path < end; ++path) {
      fill_path_noise(rng, static_cast<std::uint64_t>(path), s.noise);
      checksums[path] = fnv1a(s.noise);

      Trajectory* traj = nullptr;
      if (path < retained) {
        e.trajectories[path] = make_trajectory(static_cast<std::uint64_t>(path), n, stored_minors, costs);
        traj = &e.trajectories[path];
      }

      double x0 = p.x0_init;
      std::fill(s.x.begin(), s.x.end(), p.xi_init);
      std::fill(s.mins.begin(), s.mins.end(), kInf);
      std::fill(s.costs.begin(), s.costs.end(), 0.0);
      double major_min = kInf;
      double market_min = kInf;
      double major_cost = 0.0;

      for (int k = 0;; ++k) {
        double sum = 0.0;
        for (int i = 0; i < N; ++i) sum += s.x[i];
        if (!std::isfinite(sum) || !std::isfinite(x0)) abort_non_finite(path, grid.time(k));
        const double x_avg = sum * inv_n;
        const double target = market_state(x_avg, x0, p.F, p.G);

        major_min = std::min(major_min, x0);
        market_min = std::min(market_min, target);
        for (int i = 0; i < N; ++i) s.mins[i] = std::min(s.mins[i], s.x[i]);

        double u0 = major_control(coef.phi0[k], x_avg, x0, p, mode);
        for (int i = 0; i < N; ++i) s.u[i] = minor_control(coef.phi[k], x_avg, x0, s.x[i], p);
        if (pert) {
          if (pert->target == Perturbation::Target::Major) {
            u0 += perturbation_term(*pert, u0, k);
          } else {
            const int j = pert->minor_index;
            s.u[j] += perturbation_term(*pert, s.u[j], k);
          }
        }

        if (traj) {
          traj->major[k] = x0;
          traj->average[k] = x_avg;
          traj->market[k] = target;
          for (int i = 0; i < stored_minors; ++i) traj->minors[static_cast<std::size_t>(i) * (n + 1) + k] = s.x[i];
          if (costs) {
            traj->major_control[k] = u0;
            for (int i = 0; i < stored_minors; ++i) {
              traj->minor_controls[static_cast<std::size_t>(i) * (n + 1) + k] = s.u[i];
            }
          }
        }

        if (costs) {
          const double w = (k == 0 || k == n) ? 0.5 * dt : dt;
          major_cost += w * running_cost(u0, x_avg - x0, p.q0, p.eps0);
          for (int i = 0; i < N; ++i) s.costs[i] += w * running_cost(s.u[i], target - s.x[i], p.q, p.eps);
          if (k == n) {
            major_cost += terminal_cost(x_avg - x0, p.c0);
            for (int i = 0; i < N; ++i) s.costs[i] += terminal_cost(target - s.x[i], p.c);
          }
        }
        if (k == n) break;

        const double x0_next = euler_step(x0, p.a0 * (x_avg - x0), u0, p.sigma0, dt, sqrt_dt * s.noise[k]);
        for (int i = 0; i < N; ++i) {
          const double dW = sqrt_dt * s.noise[static_cast<std::size_t>(i + 1) * n + k];
          s.x[i] = euler_step(s.x[i], p.a * (target - s.x[i]), s.u[i], p.sigma, dt, dW);
        }
        x0 = x0_next;
      }

      e.major_min[path] = major_min;
      e.market_min[path] = market_min;
      int defaults = 0;
      for (int i = 0; i < N; ++i) {
        e.minor_min[static_cast<std::size_t>(path) * N + i] = s.mins[i];
        if (s.mins[i] <= p.D) ++defaults;
      }
      e.minor_defaults[path] = defaults;
      if (costs) {
        e.major_cost[path] = major_cost;
        std::copy(s.costs.begin(), s.costs.end(), e.minor_cost.begin() + static_cast<std::ptrdiff_t>(path) * N);
      }
    }
  });

  e.noise_checksum = combine_checksums(checksums);
  return e;
}

PathEnsemble simulate_limiting(const MarketParams& p, const RiccatiSolution& rs, int M, const SimGrid& grid,
                               int n_paths, const RngPolicy& rng, StrategyMode mode, const SimOptions& opts) {
  check_inputs(p, rs, grid, M, n_paths, mode);
  if (opts.perturbation) throw UnsupportedInput("perturbations are only defined for the finite market");
  if (opts.retain_costs) throw UnsupportedInput("cost retention is only defined for the finite market");

  const int n = grid.n_steps;
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  const SampledCoefficients coef = sample_coefficients(rs, grid);
  const int retained = std::min(std::max(opts.retain_trajectories, 0), n_paths);
  const int stored_minors = std::min(std::max(opts.trajectory_minor_limit, 0), M);

  PathEnsemble e;
  e.kind = PopulationKind::Limiting;
  e.n_paths = n_paths;
  e.n_minors = M;
  e.grid = grid;
  e.threshold = p.D;
  e.mode = mode;
  e.major_min.resize(n_paths);
  e.market_min.resize(n_paths);
  e.minor_min.resize(static_cast<std::size_t>(n_paths) * M);
  e.trajectories.resize(retained);
  std::vector<std::uint64_t> checksums(n_paths);

  parallel_chunks(n_paths, opts.workers, [&](int, std::int64_t begin, std::int64_t end) {
    Scratch s;
    s.noise.resize(static_cast<std::size_t>(M + 1) * n);
    s.x.resize(M);
    s.mins.resize(M);

    for (std::int64_t path = begin; path < end; ++path) {
      fill_path_noise(rng, static_cast<std::uint64_t>(path), s.noise);
      checksums[path] = fnv1a(s.noise);

      Trajectory* traj = nullptr;
      if (path < retained) {
        e.trajectories[path] = make_trajectory(static_cast<std::uint64_t>(path), n, stored_minors, false);
        traj = &e.trajectories[path];
      }

      double x0 = p.x0_init;
      double x_bar = p.xi_init;
      std::fill(s.x.begin(), s.x.end(), p.xi_init);
      std::fill(s.mins.begin(), s.mins.end(), kInf);
      double major_min = kInf;
      double market_min = kInf;

      for (int k = 0;; ++k) {
        if (!std::isfinite(x0) || !std::isfinite(x_bar)) abort_non_finite(path, grid.time(k));
        const double target = market_state(x_bar, x0, p.F, p.G);
        major_min = std::min(major_min, x0);
        market_min = std::min(market_min, target);
        for (int i = 0; i < M; ++i) {
          if (!std::isfinite(s.x[i])) abort_non_finite(path, grid.time(k));
          s.mins[i] = std::min(s.mins[i], s.x[i]);
        }
        if (traj) {
          traj->major[k] = x0;
          traj->average[k] = x_bar;
          traj->market[k] = target;
          for (int i = 0; i < stored_minors; ++i) traj->minors[static_cast<std::size_t>(i) * (n + 1) + k] = s.x[i];
        }
        if (k == n) break;

        const double u0 = major_control(coef.phi0[k], x_bar, x0, p, mode);
        for (int i = 0; i < M; ++i) {
          const double dW = sqrt_dt * s.noise[static_cast<std::size_t>(i + 1) * n + k];
          const double ui = minor_control(coef.phi[k], x_bar, x0, s.x[i], p);
          s.x[i] = euler_step(s.x[i], p.a * (target - s.x[i]), ui, p.sigma, dt, dW);
        }
        const double x_bar_next = x_bar + meanfield_drift(coef.phi[k], x_bar, x0, p, mode) * dt;
        x0 = euler_step(x0, p.a0 * (x_bar - x0), u0, p.sigma0, dt, sqrt_dt * s.noise[k]);
        x_bar = x_bar_next;
      }

      e.major_min[path] = major_min;
      e.market_min[path] = market_min;
      std::copy(s.mins.begin(), s.mins.end(), e.minor_min.begin() + static_cast<std::ptrdiff_t>(path) * M);
    }
  });

  e.noise_checksum = combine_checksums(checksums);
  return e;
}

}  // namespace interbank
