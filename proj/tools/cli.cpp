#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "interbank/config.hpp"
#include "interbank/experiments.hpp"

#ifndef INTERBANK_VERSION
#define INTERBANK_VERSION "unknown"
#endif

namespace interbank::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mode = "derivation";
  int paths = 0;  // 0: subcommand default
  int steps = 100;
  int riccati_steps = 1000;
  int workers = 1;
  bool retain_costs = false;
  int retain_trajectories = 16;
  std::string out = ".";
  int N = 10;
  int M = 1000;
  std::string population = "finite";
  bool loss = false;
  std::string panels = "size";
  int directions = 20;
  bool no_crn = false;
};

struct Context {
  std::string subcommand;
  Options opt;
  ConfigFile cfg;
  json extra = json::object();
};

void add_common(CLI::App* sub, Options& o, bool stochastic) {
  sub->add_option("--config", o.config, "key=value parameter file");
  sub->add_option("--mode", o.mode, "strategy form: theorem | derivation | oracle")
      ->check(CLI::IsMember({"theorem", "derivation", "oracle"}));
  sub->add_option("--riccati-steps", o.riccati_steps, "Riccati integration steps")->check(CLI::Range(2, 100000000));
  sub->add_option("--out", o.out, "output directory");
  if (!stochastic) return;
  sub->add_option("--seed", o.seed, "master seed (required)")->required();
  sub->add_option("--paths", o.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
  sub->add_option("--steps", o.steps, "simulation time steps")->check(CLI::PositiveNumber);
  sub->add_option("--workers", o.workers, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  sub->add_flag("--no-crn", o.no_crn, "draw fresh increments for every scenario");
}

MarketParams load_params(Context& ctx) {
  if (!ctx.opt.config.empty()) ctx.cfg = load_config(ctx.opt.config);
  validate_params(ctx.cfg.params);
  return ctx.cfg.params;
}

RngPolicy rng_policy(const Options& o) {
  RngPolicy rng;
  rng.master_seed = *o.seed;
  rng.scenario_crn = !o.no_crn;
  return rng;
}

SimSettings sim_settings(const Options& o, int default_paths) {
  SimSettings s;
  s.N = o.N;
  s.n_paths = o.paths > 0 ? o.paths : default_paths;
  s.n_steps = o.steps;
  s.workers = o.workers;
  s.mode = parse_mode(o.mode);
  s.riccati.steps = o.riccati_steps;
  s.rng = rng_policy(o);
  s.loss_histograms = o.loss;
  return s;
}

std::vector<double> default_g() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }
std::vector<double> default_a() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

// Outputs are collected in memory and only written once the run has succeeded,
// so a failed run leaves no partial files behind.
struct PendingFiles {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw IoError("failed writing " + path.string());
}

json settings_json(const Options& o) {
  json j;
  j["mode"] = o.mode;
  j["riccati_steps"] = o.riccati_steps;
  j["steps"] = o.steps;
  j["paths"] = o.paths;
  j["workers"] = o.workers;
  j["N"] = o.N;
  j["crn"] = !o.no_crn;
  return j;
}

void cmd_riccati(Context& ctx, PendingFiles& files) {
  const MarketParams p = load_params(ctx);
  RiccatiOptions ro;
  ro.steps = ctx.opt.riccati_steps;
  files.add("riccati.csv", riccati_csv(riccati_table(p, parse_mode(ctx.opt.mode), ro)));
}

void cmd_simulate(Context& ctx, PendingFiles& files) {
  const MarketParams p = load_params(ctx);
  const Options& o = ctx.opt;
  const SimSettings s = sim_settings(o, 5000);
  const RiccatiSolution rs = solve_strategy(p, s.mode, s.riccati);
  SimOptions so;
  so.workers = s.workers;
  so.retain_trajectories = o.retain_trajectories;
  so.retain_costs = o.retain_costs;
  const bool finite = o.population == "finite";
  const SimGrid grid = SimGrid::make(p.T, s.n_steps);
  const PathEnsemble e = finite ? simulate_finite(p, rs, s.N, grid, s.n_paths, s.rng, s.mode, so)
                                : simulate_limiting(p, rs, o.M, grid, s.n_paths, s.rng, s.mode, so);

  std::string summary = "path,major_min,market_min,minor_defaults";
  if (e.has_costs()) summary += ",major_cost";
  summary += '\n';
  for (int path = 0; path < e.n_paths; ++path) {
    int defaults = 0;
    for (int i = 0; i < e.n_minors; ++i) defaults += path_default_indicator(e.minor_minimum(path, i), p.D);
    summary += std::to_string(path) + ',' + format_number(e.major_min[path]) + ',' +
               format_number(e.market_min[path]) + ',' + std::to_string(defaults);
    if (e.has_costs()) summary += ',' + format_number(e.major_cost[path]);
    summary += '\n';
  }
  files.add("summary.csv", summary);

  ScenarioSweep one;
  one.parameter = "G";
  one.base = p;
  SweepRow row;
  row.value = p.G;
  row.has_major = p.G > 0.0;
  row.params = p;
  row.report = estimate_risk_report(e, p.D);
  row.noise_checksum = e.noise_checksum;
  one.rows.push_back(row);
  files.add("risk.csv", risk_csv(one));

  if (!e.trajectories.empty()) {
    std::string traj = "path,t,bank_id,x\n";
    for (const Trajectory& t : e.trajectories) traj += trajectory_csv(t, grid);
    files.add("trajectories.csv", traj);
  }
  ctx.extra["population"] = o.population;
  ctx.extra["noise_checksum"] = e.noise_checksum;
  if (!finite) ctx.extra["M"] = o.M;
}

void write_sweep(Context& ctx, PendingFiles& files, const ScenarioSweep& sweep) {
  files.add("risk.csv", risk_csv(sweep));
  if (ctx.opt.loss) files.add("loss.csv", loss_csv(sweep));
}

void cmd_sweep_g(Context& ctx, PendingFiles& files) {
  const MarketParams p = load_params(ctx);
  const auto g = ctx.cfg.g_values.empty() ? default_g() : ctx.cfg.g_values;
  write_sweep(ctx, files, sweep_size_G(p, g, sim_settings(ctx.opt, 50000)));
  ctx.extra["g_values"] = g;
}

void cmd_sweep_a(Context& ctx, PendingFiles& files) {
  const MarketParams p = load_params(ctx);
  const auto a = ctx.cfg.a_values.empty() ? default_a() : ctx.cfg.a_values;
  write_sweep(ctx, files, sweep_friction_a(p, a, sim_settings(ctx.opt, 50000)));
  ctx.extra["a_values"] = a;
}

void cmd_loss(Context& ctx, PendingFiles& files) {
  const MarketParams p = load_params(ctx);
  SimSettings s = sim_settings(ctx.opt, 50000);
  s.loss_histograms = true;
  ScenarioSweep one;
  one.parameter = "G";
  one.base = p;
  one.rows.push_back(run_scenario(p, p.G, p.G > 0.0, s));
  files.add("loss.csv", loss_csv(one));
}

void cmd_converge(Context& ctx, PendingFiles& files) {
  const MarketParams p = load_params(ctx);
  const std::vector<int> n_list = ctx.cfg.n_list.empty() ? std::vector<int>{10, 100} : ctx.cfg.n_list;
  const SimSettings s = sim_settings(ctx.opt, 1000);
  const ConvergenceStudy study = convergence_study(p, n_list, s);
  files.add("convergence.csv", convergence_csv(study));
  const SimGrid grid = SimGrid::make(p.T, s.n_steps);
  std::string paths = "population,path,t,bank_id,x\n";
  paths += trajectory_csv(study.limiting, grid, "limiting");
  for (std::size_t i = 0; i < study.finite.size(); ++i) {
    paths += trajectory_csv(study.finite[i], grid, "N=" + std::to_string(study.rows[i].N));
  }
  files.add("convergence_paths.csv", paths);
  ctx.extra["n_list"] = n_list;
}

void cmd_export(Context& ctx, PendingFiles& files) {
  const MarketParams p = load_params(ctx);
  const SimSettings s = sim_settings(ctx.opt, 1000);
  const PanelSet set = parse_panel_set(ctx.opt.panels);
  files.add("trajectories_" + std::string(to_string(set)) + ".csv",
            trajectory_csv(export_trajectories(p, set, s, std::max(ctx.opt.retain_trajectories, 1))));
  ctx.extra["panels"] = ctx.opt.panels;
}

void cmd_validate(Context& ctx, PendingFiles& files) {
  const MarketParams p = load_params(ctx);
  const Options& o = ctx.opt;
  const std::vector<int> n_list = ctx.cfg.n_list.empty() ? std::vector<int>{10, 100} : ctx.cfg.n_list;
  ValidationSettings vs;
  vs.n_paths = o.paths > 0 ? o.paths : 5000;
  vs.n_steps = o.steps;
  vs.workers = o.workers;
  vs.riccati.steps = o.riccati_steps;
  vs.rng = rng_policy(o);
  const StrategyMode mode = parse_mode(o.mode);
  const std::vector<double> deltas{-0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2};
  const SimGrid grid = SimGrid::make(p.T, vs.n_steps);
  const auto specs = seeded_directions(grid, vs.rng, 1, o.directions, BankSelector::minor(0), deltas);
  const RiccatiSolution rs = solve_strategy(p, mode, vs.riccati);

  json report;
  report["mode"] = o.mode;
  report["deltas"] = deltas;
  json minors = json::array();
  for (int N : n_list) {
    vs.N = N;
    const auto results = best_response_gaps(p, rs, mode, specs, vs);
    const MeasuredEpsilon eps = measured_epsilon(results);
    json entry;
    entry["N"] = N;
    entry["epsilon"] = eps.epsilon;
    entry["epsilon_se"] = eps.se;
    entry["worst_direction"] = eps.label;
    entry["directions"] = json::array();
    for (const auto& r : results) entry["directions"].push_back(to_json(r));
    minors.push_back(entry);
  }
  report["minor_best_response"] = minors;
  vs.N = n_list.front();
  report["mode_comparison"] = to_json(mode_comparison(p, vs));
  files.add("validation.json", report.dump(2) + "\n");
  ctx.extra["n_list"] = n_list;
  ctx.extra["directions"] = o.directions;
}

}  // namespace

std::string version() { return INTERBANK_VERSION; }

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Config: return kConfig;
    case ErrorCategory::Parameter: return kParameter;
    case ErrorCategory::Numerical: return kNumerical;
    case ErrorCategory::Simulation: return kSimulation;
    case ErrorCategory::Unsupported:
    case ErrorCategory::NoMatch: return kUnsupported;
    case ErrorCategory::Io: return kIo;
  }
  return kUsage;
}

json to_json(const MarketParams& p) {
  json j = json::object();
  for (const auto& name : param_names()) j[name] = param_value(p, name);
  return j;
}

json to_json(const BestResponseResult& r) {
  json j;
  j["label"] = r.label;
  j["target"] = r.who.target == Perturbation::Target::Major ? "major" : "minor";
  if (r.who.target == Perturbation::Target::Minor) j["minor_index"] = r.who.minor_index;
  j["points"] = json::array();
  for (const GapPoint& pt : r.points) {
    j["points"].push_back(
        {{"delta", pt.delta}, {"cost", pt.cost}, {"cost_se", pt.cost_se}, {"gap", pt.gap}, {"gap_se", pt.gap_se}});
  }
  j["curvature"] = r.curvature;
  j["slope"] = r.slope;
  j["nonnegative"] = r.nonnegative;
  j["convex"] = r.convex;
  j["even"] = r.even;
  j["worst_asymmetry_z"] = r.worst_asymmetry_z;
  return j;
}

json to_json(const ModeComparison& m) {
  json j;
  j["params"] = to_json(m.params);
  j["phi0_at_0"] = json::object();
  for (const auto& [name, values] : m.phi0) j["phi0_at_0"][name] = values.front();
  j["phi0_divergence"] = json::array();
  for (const auto& d : m.divergence) {
    j["phi0_divergence"].push_back({{"first", d.first}, {"second", d.second}, {"max_abs_diff", d.max_abs_diff}});
  }
  j["modes"] = json::array();
  for (const auto& s : m.modes) {
    json e;
    e["mode"] = std::string(to_string(s.mode));
    e["epsilon"] = s.epsilon.epsilon;
    e["epsilon_se"] = s.epsilon.se;
    e["worst_direction"] = s.epsilon.label;
    e["worst_delta"] = s.epsilon.delta;
    e["major_gaps"] = json::array();
    for (const auto& r : s.major_gaps) e["major_gaps"].push_back(to_json(r));
    j["modes"].push_back(e);
  }
  j["best_mode"] = std::string(to_string(m.best_mode));
  return j;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Major-minor interbank market: Riccati strategies, Monte Carlo default and systemic risk", "interbank"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  Context ctx;
  Options& o = ctx.opt;

  auto* riccati = app.add_subcommand("riccati", "coefficient paths phi, phi0 and the oracle phi0");
  add_common(riccati, o, false);

  auto* simulate = app.add_subcommand("simulate", "simulate one scenario");
  add_common(simulate, o, true);
  simulate->add_option("-N,--minors", o.N, "minor banks (finite population)")->check(CLI::PositiveNumber);
  simulate->add_option("-M,--representatives", o.M, "representative minors (limiting population)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--population", o.population, "finite | limiting")
      ->check(CLI::IsMember({"finite", "limiting"}));
  simulate->add_flag("--retain-costs", o.retain_costs, "accumulate realized costs per bank");
  simulate->add_option("--retain-trajectories", o.retain_trajectories, "paths kept in full")
      ->check(CLI::NonNegativeNumber);

  auto* sweep_g = app.add_subcommand("sweep-g", "risk table across the major bank's size G");
  auto* sweep_a = app.add_subcommand("sweep-a", "risk table across the mean-reversion rate a");
  for (auto* sub : {sweep_g, sweep_a}) {
    add_common(sub, o, true);
    sub->add_option("-N,--minors", o.N, "minor banks")->check(CLI::PositiveNumber);
    sub->add_flag("--loss", o.loss, "also write loss histograms");
  }

  auto* converge = app.add_subcommand("converge", "finite vs limiting distances over n_list");
  add_common(converge, o, true);

  auto* exp = app.add_subcommand("export", "trajectory panels conditioned on the major's default");
  add_common(exp, o, true);
  exp->add_option("--panels", o.panels, "size | friction")->check(CLI::IsMember({"size", "friction"}));
  exp->add_option("-N,--minors", o.N, "minor banks")->check(CLI::PositiveNumber);
  exp->add_option("--retain-trajectories", o.retain_trajectories, "paths searched for each panel")
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "best-response gaps and strategy-form comparison");
  add_common(validate, o, true);
  validate->add_option("--directions", o.directions, "seeded minor perturbation directions")
      ->check(CLI::PositiveNumber);

  auto* loss = app.add_subcommand("loss-dist", "loss histogram for one scenario");
  add_common(loss, o, true);
  loss->add_option("-N,--minors", o.N, "minor banks")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << version() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  PendingFiles files;
  try {
    CLI::App* sub = app.get_subcommands().front();
    ctx.subcommand = sub->get_name();
    if (sub == riccati) cmd_riccati(ctx, files);
    else if (sub == simulate) cmd_simulate(ctx, files);
    else if (sub == sweep_g) cmd_sweep_g(ctx, files);
    else if (sub == sweep_a) cmd_sweep_a(ctx, files);
    else if (sub == converge) cmd_converge(ctx, files);
    else if (sub == exp) cmd_export(ctx, files);
    else if (sub == validate) cmd_validate(ctx, files);
    else cmd_loss(ctx, files);

    const fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    json manifest;
    manifest["subcommand"] = ctx.subcommand;
    manifest["version"] = version();
    manifest["config"] = o.config;
    manifest["params"] = to_json(ctx.cfg.params);
    if (o.seed) manifest["seed"] = *o.seed;
    manifest["settings"] = settings_json(o);
    manifest["details"] = ctx.extra;
    manifest["outputs"] = json::array();
    for (const auto& [name, content] : files.files) {
      write_file(dir / name, content);
      manifest["outputs"].push_back(name);
      out << (dir / name).string() << '\n';
    }
    manifest["duration_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return kOk;
  } catch (const Error& e) {
    err << "error: " << category_name(e.category()) << ": " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace interbank::cli
