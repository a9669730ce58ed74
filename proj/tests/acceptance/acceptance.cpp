// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "interbank/experiments.hpp"
#include "interbank/risk.hpp"
#include "interbank/validate.hpp"
#include "oracles.hpp"

using namespace interbank;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

MarketParams defaults() { return MarketParams{}; }

double combined_se(double a, double b) { return std::sqrt(a * a + b * b); }

// Increasing after smoothing: every consecutive step may fall by at most 2 SE.
bool increasing(const std::vector<Estimate>& v, std::string* where) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k].value - v[k - 1].value <= -2.0 * combined_se(v[k].se, v[k - 1].se)) {
      *where = "step " + std::to_string(k);
      return false;
    }
  }
  return true;
}

bool decreasing(std::vector<Estimate> v, std::string* where) {
  for (auto& e : v) e.value = -e.value;
  return increasing(v, where);
}

void check_residuals(Outcome& o, const ScenarioSweep& sweep) {
  for (const auto& row : sweep.rows) {
    if (!row.has_major) continue;
    const auto res = total_probability_residual(row.report);
    if (!res) continue;
    o.check(std::abs(res->minor) <= 1e-12 && std::abs(res->systemic) <= 1e-12,
            "total probability residual at " + sweep.parameter + "=" + num(row.value));
  }
}

// 1. derive_clearing is exact.
Outcome market_clearing() {
  Outcome o;
  std::mt19937_64 engine(kSeed);
  std::uniform_real_distribution<double> ua(0.01, 50.0), ug(0.0, 1.0);
  int bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const double a = ua(engine), G = ug(engine);
    const Clearing c = derive_clearing(a, G);
    bad += !(c.a0 == a * G && c.F + G == 1.0);
  }
  o.check(bad == 0, std::to_string(bad) + " of 1000 draws off");
  o.note("1000 draws");
  return o;
}

// 2. Riccati solver: degenerate zero solution, fourth-order self-convergence,
// exact terminal values.
Outcome riccati_correctness() {
  Outcome o;
  MarketParams z = defaults();
  z.eps = z.q * z.q;
  z.c = 0.0;
  const auto phi_zero = solve_minor_phi(z);
  double m = 0.0;
  for (double v : phi_zero.values) m = std::max(m, std::abs(v));
  o.check(m <= 1e-12, "max|phi| = " + num(m) + " with eps = q^2");

  const MarketParams p = defaults();
  auto solve = [&](int steps) {
    RiccatiOptions opts;
    opts.steps = steps;
    const auto phi = solve_minor_phi(p, opts);
    const auto phi0 = solve_major_phi0(p, phi, Phi0Form::DerivationConsistent, opts);
    return std::pair{phi, phi0};
  };
  const int coarse = 25, fine_ref = 6400;
  const auto [rphi, rphi0] = solve(fine_ref);
  auto error = [&](const CoefficientPath& c, const CoefficientPath& ref) {
    const int stride = static_cast<int>((ref.values.size() - 1) / (c.values.size() - 1));
    double e = 0.0;
    for (std::size_t k = 0; k < c.values.size(); ++k) e = std::max(e, std::abs(c.values[k] - ref.values[k * stride]));
    return e;
  };
  const auto [phi1, phi01] = solve(coarse);
  const auto [phi2, phi02] = solve(2 * coarse);
  const double ratio_phi = error(phi1, rphi) / error(phi2, rphi);
  const double ratio_phi0 = error(phi01, rphi0) / error(phi02, rphi0);
  o.check(ratio_phi >= 8.0, "phi ratio " + num(ratio_phi));
  o.check(ratio_phi0 >= 8.0, "phi0 ratio " + num(ratio_phi0));
  o.note("halving ratios phi " + num(ratio_phi) + ", phi0 " + num(ratio_phi0));

  MarketParams t = defaults();
  t.c = 0.8;
  t.c0 = 0.3;
  for (StrategyMode mode : {StrategyMode::TheoremAsPublished, StrategyMode::DerivationConsistent,
                            StrategyMode::MatrixOracle}) {
    const auto rs = solve_strategy(t, mode);
    o.check(rs.phi.back() == -t.c && rs.phi0.back() == -t.c0,
            "terminal values in mode " + std::string(to_string(mode)));
  }
  return o;
}

// 3. Matrix oracle: symmetric P, annihilates (1, 1), exact terminal phi0.
Outcome oracle_structure() {
  Outcome o;
  MarketParams p = defaults();
  p.c0 = 0.4;
  const auto phi = solve_minor_phi(p);
  const auto oracle = solve_major_lqr_oracle(build_extended_system(p), phi);
  double asym = 0.0, null = 0.0;
  for (const auto& P : oracle.P) {
    asym = std::max(asym, (P - P.transpose()).cwiseAbs().maxCoeff());
    null = std::max(null, (P * Eigen::Vector2d(1.0, 1.0)).cwiseAbs().maxCoeff());
  }
  o.check(asym <= 1e-10, "max |P - P^T| = " + num(asym));
  o.check(null <= 1e-10, "max |P [1,1]| = " + num(null));
  o.check(oracle.implied_phi0.back() == -p.c0, "implied phi0(T) = " + num(oracle.implied_phi0.back()));
  o.note("asymmetry " + num(asym) + ", null-vector residual " + num(null));
  return o;
}

// 4. G = 0: benchmark Riccati solution and independent bank noise.
Outcome single_population() {
  Outcome o;
  const MarketParams p = with_major_size(defaults(), 0.0);
  const auto phi = solve_minor_phi(p);
  double res = 0.0;
  for (std::size_t k = 0; k < phi.grid.size(); ++k) {
    const double eta = -phi.values[k];
    res = std::max(res, std::abs(eta - oracle::benchmark_eta(phi.grid[k], p.a, p.q, p.eps, p.c, p.T)));
  }
  o.check(res <= 1e-8, "eta residual " + num(res));

  const int paths = 5000, N = 10;
  const auto rs = solve_strategy(p, StrategyMode::DerivationConsistent);
  SimOptions so;
  so.workers = workers();
  so.retain_trajectories = paths;
  so.trajectory_minor_limit = N;
  RngPolicy rng;
  rng.master_seed = kSeed;
  const SimGrid grid = SimGrid::make(p.T, 100);
  const auto e = simulate_finite(p, rs, N, grid, paths, rng, StrategyMode::DerivationConsistent, so);

  // Correlation of one-step increments of banks 1 and 2 at a few times; zero is
  // accepted when |r| sqrt(n) < 1.96.
  double worst = 0.0;
  for (int k : {0, 50, 99}) {
    std::vector<double> d1(paths), d2(paths);
    for (int path = 0; path < paths; ++path) {
      const auto& t = e.trajectories[path];
      d1[path] = t.minor(1, k + 1) - t.minor(1, k);
      d2[path] = t.minor(2, k + 1) - t.minor(2, k);
    }
    const double m1 = std::accumulate(d1.begin(), d1.end(), 0.0) / paths;
    const double m2 = std::accumulate(d2.begin(), d2.end(), 0.0) / paths;
    double c = 0.0, v1 = 0.0, v2 = 0.0;
    for (int i = 0; i < paths; ++i) {
      c += (d1[i] - m1) * (d2[i] - m2);
      v1 += (d1[i] - m1) * (d1[i] - m1);
      v2 += (d2[i] - m2) * (d2[i] - m2);
    }
    const double z = std::abs(c / std::sqrt(v1 * v2)) * std::sqrt(static_cast<double>(paths));
    worst = std::max(worst, z);
    o.check(z < 1.96, "increment correlation at step " + std::to_string(k) + " has z = " + num(z));
  }

  // The major no longer enters any minor's dynamics: changing its noise level
  // leaves every minor path unchanged.
  MarketParams loud = p;
  loud.sigma0 = 5.0;
  SimOptions few = so;
  few.retain_trajectories = 20;
  const auto a = simulate_finite(p, rs, N, grid, 20, rng, StrategyMode::DerivationConsistent, few);
  const auto b = simulate_finite(loud, rs, N, grid, 20, rng, StrategyMode::DerivationConsistent, few);
  bool same = true;
  for (int path = 0; path < 20; ++path) same = same && a.trajectories[path].minors == b.trajectories[path].minors;
  o.check(same, "minor paths depend on the major at G = 0");
  o.note("eta residual " + num(res) + ", worst increment z " + num(worst));
  return o;
}

// 5. Estimator identities.
Outcome estimator_identities() {
  Outcome o;
  SimSettings s;
  s.n_paths = 5000;
  s.workers = workers();
  s.rng.master_seed = kSeed;
  s.loss_histograms = true;
  std::vector<ScenarioSweep> sweeps{sweep_size_G(defaults(), {0.1, 0.3, 0.5, 0.7, 0.9}, s),
                                    sweep_friction_a(defaults(), {1, 5, 10}, s)};
  int ensembles = 0;
  for (const auto& sweep : sweeps) {
    check_residuals(o, sweep);
    for (const auto& row : sweep.rows) {
      ++ensembles;
      const LossHistogram& h = *row.loss;
      o.check(std::abs(std::accumulate(h.total.begin(), h.total.end(), 0.0) - 1.0) <= 1e-12, "loss mass");
      if (!h.given_MD || !h.given_MS) continue;
      for (std::size_t k = 0; k < h.total.size(); ++k) {
        const double rec = h.p0 * (*h.given_MD)[k] + (1.0 - h.p0) * (*h.given_MS)[k];
        o.check(std::abs(h.total[k] - rec) <= 1e-12, "loss recombination at k=" + std::to_string(k));
      }
    }
  }

  // A path touching D exactly is a default.
  PathEnsemble e;
  e.kind = PopulationKind::Finite;
  e.n_paths = 2;
  e.n_minors = 1;
  e.threshold = -0.65;
  e.major_min = {-0.65, 0.0};
  e.market_min = {-0.65, 0.0};
  e.minor_min = {-0.65, 0.0};
  e.minor_defaults = {1, 0};
  const RiskReport r = estimate_risk_report(e, -0.65);
  o.check(path_default_indicator(-0.65, -0.65), "indicator at the boundary");
  o.check(r.p0.value == 0.5 && r.pi.value == 0.5 && r.pse.value == 0.5, "boundary path not counted");
  o.note(std::to_string(ensembles) + " ensembles");
  return o;
}

// 6. G-sweep directions.
Outcome g_sweep() {
  Outcome o;
  SimSettings s;
  s.workers = workers();
  s.rng.master_seed = kSeed;
  const std::vector<double> g{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const auto sweep = sweep_size_G(defaults(), g, s);
  check_residuals(o, sweep);
  const double baseline = sweep.rows.front().report.pi.value;
  std::vector<Estimate> pi_md, pse_md;
  for (std::size_t k = 1; k < sweep.rows.size(); ++k) {
    const auto& row = sweep.rows[k];
    const auto& r = row.report;
    if (!r.pi_given_MD || !r.pi_given_MS || !r.pse_given_MD || !r.pse_given_MS) {
      o.check(false, "empty conditioning set at G=" + num(row.value));
      return o;
    }
    pi_md.push_back(*r.pi_given_MD);
    pse_md.push_back(*r.pse_given_MD);
    o.check(r.pi_given_MS->value < baseline,
            "p_i|MS " + num(r.pi_given_MS->value) + " >= baseline at G=" + num(row.value));
    if (row.value >= 0.4 - 1e-12) {
      o.check(r.pse_given_MS->value <= 0.01, "p_SE|MS " + num(r.pse_given_MS->value) + " at G=" + num(row.value));
    }
  }
  std::string where;
  o.check(increasing(pi_md, &where), "p_i|MD not increasing at " + where);
  o.check(increasing(pse_md, &where), "p_SE|MD not increasing at " + where);
  o.note("p_i|MD " + num(pi_md.front().value) + " -> " + num(pi_md.back().value) + ", p_SE|MD " +
         num(pse_md.front().value) + " -> " + num(pse_md.back().value) + ", baseline p_i " + num(baseline));
  return o;
}

// 7. a-sweep directions.
Outcome a_sweep() {
  Outcome o;
  SimSettings s;
  s.workers = workers();
  s.rng.master_seed = kSeed;
  const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto sweep = sweep_friction_a(defaults(), a, s);
  check_residuals(o, sweep);
  std::vector<Estimate> pi_free, pse_free, pi_md, pse_md;
  for (const auto& row : sweep.rows) {
    if (!row.has_major) {
      pi_free.push_back(row.report.pi);
      pse_free.push_back(row.report.pse);
      continue;
    }
    o.check(row.params.a0 == 0.5 * row.params.a, "a0 != a/2 at a=" + num(row.value));
    if (!row.report.pi_given_MD || !row.report.pse_given_MD) {
      o.check(false, "no major defaults at a=" + num(row.value));
      return o;
    }
    pi_md.push_back(*row.report.pi_given_MD);
    pse_md.push_back(*row.report.pse_given_MD);
  }
  std::string where;
  o.check(decreasing(pi_free, &where), "no-major p_i not decreasing at " + where);
  o.check(increasing(pi_md, &where), "p_i|MD not increasing at " + where);
  o.check(increasing(pse_md, &where), "p_SE|MD not increasing at " + where);
  for (std::size_t i = 0; i < pse_free.size(); ++i) {
    for (std::size_t j = i + 1; j < pse_free.size(); ++j) {
      o.check(std::abs(pse_free[i].value - pse_free[j].value) <= 2.0 * combined_se(pse_free[i].se, pse_free[j].se),
              "no-major p_SE not flat between a=" + num(a[i]) + " and a=" + num(a[j]));
    }
  }
  o.note("no-major p_i " + num(pi_free.front().value) + " -> " + num(pi_free.back().value) + ", p_i|MD " +
         num(pi_md.front().value) + " -> " + num(pi_md.back().value) + ", p_SE|MD " + num(pse_md.front().value) +
         " -> " + num(pse_md.back().value));
  return o;
}

// 8. Finite populations approach the limiting mean field.
Outcome convergence() {
  Outcome o;
  SimSettings s;
  s.n_paths = 1000;
  s.workers = workers();
  s.rng.master_seed = kSeed;
  const auto study = convergence_study(defaults(), {10, 100}, s);
  const double d10 = study.rows[0].median_sup_average, d100 = study.rows[1].median_sup_average;
  o.check(d100 < d10, "median sup distance N=100 " + num(d100) + " vs N=10 " + num(d10));
  o.note("median sup |x^(N) - x_bar|: N=10 " + num(d10) + ", N=100 " + num(d100));
  return o;
}

// 9. Minor-bank best responses.
Outcome epsilon_nash() {
  Outcome o;
  const MarketParams p = defaults();
  ValidationSettings vs;
  vs.n_paths = 5000;
  vs.workers = workers();
  vs.rng.master_seed = kSeed;
  const std::vector<double> deltas{-0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2};
  const auto specs =
      seeded_directions(SimGrid::make(p.T, vs.n_steps), vs.rng, 1, 20, BankSelector::minor(0), deltas);
  const auto rs = solve_strategy(p, StrategyMode::DerivationConsistent, vs.riccati);
  std::vector<MeasuredEpsilon> eps;
  for (int N : {10, 100}) {
    vs.N = N;
    const auto results = best_response_gaps(p, rs, StrategyMode::DerivationConsistent, specs, vs);
    double worst_z = 0.0;
    int uneven = 0;
    for (const auto& r : results) {
      uneven += !r.even;
      const std::string tag = "N=" + std::to_string(N) + " " + r.label;
      o.check(r.nonnegative, tag + " has a gap below -2 SE");
      o.check(r.even, tag + " is not even within 2 SE (z=" + num(r.worst_asymmetry_z) + ")");
      for (const auto& pt : r.points) {
        if (pt.delta == 0.0) o.check(pt.gap == 0.0, tag + " gap(0) != 0");
      }
      worst_z = std::max(worst_z, r.worst_asymmetry_z);
    }
    eps.push_back(measured_epsilon(results));
    o.note("N=" + std::to_string(N) + " eps " + num(eps.back().epsilon) + " (se " + num(eps.back().se) +
           "), worst asymmetry z " + num(worst_z) + ", " + std::to_string(uneven) +
           " of 20 directions beyond 2 SE (0.91 expected by chance)");
  }
  o.check(eps[1].epsilon <= eps[0].epsilon + 2.0 * combined_se(eps[0].se, eps[1].se),
          "eps(100) exceeds eps(10) by more than 2 SE");
  return o;
}

// 10. Mode comparison is reproducible.
Outcome mode_report() {
  Outcome o;
  ValidationSettings vs;
  vs.n_paths = 5000;
  vs.workers = workers();
  vs.rng.master_seed = kSeed;
  const auto a = cli::to_json(mode_comparison(defaults(), vs)).dump();
  const auto first = nlohmann::json::parse(a);
  o.check(first["phi0_divergence"].size() == 6, "divergence table size");
  o.check(first["modes"].size() == 3, "per-mode gap entries");
  const auto b = cli::to_json(mode_comparison(defaults(), vs)).dump();
  o.check(a == b, "reports differ between runs");
  o.note("best mode " + first["best_mode"].get<std::string>());
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 11. CLI sweeps are byte-reproducible and independent of the worker count.
Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "interbank_acceptance";
  fs::remove_all(root);
  std::ostringstream out, err;
  auto run = [&](const std::string& cmd, const std::string& dir, const std::string& w) {
    const std::vector<std::string> args{"interbank", cmd,        "--seed", std::to_string(kSeed), "--paths",
                                        "5000",      "--workers", w,        "--loss",              "--out",
                                        (root / dir).string()};
    const int code = cli::run(args, out, err);
    o.check(code == 0, cmd + " exited with " + std::to_string(code) + ": " + err.str());
  };
  for (const std::string cmd : {"sweep-g", "sweep-a"}) {
    run(cmd, cmd + "-1", "1");
    run(cmd, cmd + "-2", "1");
    run(cmd, cmd + "-3", "3");
    for (const std::string file : {"risk.csv", "loss.csv"}) {
      const std::string ref = slurp(root / (cmd + "-1") / file);
      o.check(!ref.empty(), cmd + " " + file + " missing");
      o.check(ref == slurp(root / (cmd + "-2") / file), cmd + " " + file + " differs on rerun");
      o.check(ref == slurp(root / (cmd + "-3") / file), cmd + " " + file + " differs with 3 workers");
    }
  }
  fs::remove_all(root);
  o.note("sweep-g and sweep-a, 5000 paths, workers 1/1/3");
  return o;
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"market clearing", market_clearing},
      {"riccati correctness", riccati_correctness},
      {"matrix oracle structure", oracle_structure},
      {"single-population reduction", single_population},
      {"estimator identities", estimator_identities},
      {"trend: size sweep", g_sweep},
      {"trend: friction sweep", a_sweep},
      {"finite-population convergence", convergence},
      {"epsilon-Nash measurement", epsilon_nash},
      {"mode comparison report", mode_report},
      {"determinism", determinism},
  };
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int a = 1; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion %s\n", argv[a]);
      return 2;
    }
    selected[k - 1] = true;
  }
  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s %2zu %s (%.1fs)", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs);
    for (const auto& n : o.notes) std::printf("; %s", n.c_str());
    std::printf("\n");
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
