#include "bincat/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "bincat/coupling.hpp"
#include "bincat/cutoff.hpp"
#include "bincat/environment.hpp"
#include "bincat/errors.hpp"
#include "bincat/extinction.hpp"
#include "bincat/model.hpp"
#include "bincat/stationary.hpp"
#include "config.hpp"
#include "output.hpp"

#ifndef BINCAT_VERSION
#define BINCAT_VERSION "0.0.0"
#endif

namespace bincat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using cli::Config;
using cli::CsvWriter;

// Files written by one experiment, in the order written.
using Outputs = std::vector<std::string>;

struct Context {
  fs::path out_dir;
  ShardPlan plan;
};

ModelParams read_params(Config& cfg) {
  const double p = cfg.number("p");
  const double c = cfg.number("c");
  return ModelParams(p, c);
}

ShardPlan read_plan(Config& cfg, const RunOptions& options) {
  ShardPlan plan;
  if (options.seed) {
    plan.base_seed = *options.seed;
    cfg.set("seed", plan.base_seed);
  } else {
    plan.base_seed = cfg.count("seed", 0);
  }
  plan.tasks = cfg.count("tasks", 16);
  if (plan.tasks == 0) throw InvalidArgument("'tasks' must be positive");
  plan.threads = options.threads.value_or(1);
  return plan;
}

json series_json(const SeriesResult& r) {
  return json{{"value", r.value}, {"error_bound", r.error_bound}, {"terms", r.terms_used}};
}

Outputs run_simulate(Config& cfg, const Context& ctx) {
  const ModelParams params = read_params(cfg);
  const Count x0 = cfg.count("x0", 0);
  const Count steps = cfg.count("steps");
  cfg.finish();
  const Trajectory traj = simulate_trajectory(x0, steps, params, ctx.plan.base_seed);
  CsvWriter csv(ctx.out_dir / "trajectory.csv", {"t", "x"});
  for (std::size_t t = 0; t < traj.states.size(); ++t) csv.row(t, traj.states[t]);
  csv.close();
  return {"trajectory.csv"};
}

Outputs run_stationary(Config& cfg, const Context& ctx) {
  const ModelParams params = read_params(cfg);
  const double budget = cfg.number("truncation", kDefaultTruncation);
  const double tol = cfg.number("series_tol", kDefaultSeriesTol);
  const bool power = cfg.flag("power_iteration", false);
  const Count kac_samples = cfg.count("kac_samples", 0);
  const Count kac_cap = cfg.count("kac_t_cap", 100'000'000);
  cfg.finish();

  const Pmf pi = stationary_pmf(params, budget);
  CsvWriter csv(ctx.out_dir / "pi.csv", {"state", "probability"});
  for (std::size_t x = 0; x < pi.size(); ++x) csv.row(x, pi[x]);
  csv.close();

  const SeriesResult pi0 = pi_zero(params, tol);
  const PersistenceTime tau = persistence_time(params, tol);
  json summary;
  summary["p"] = params.p();
  summary["c"] = params.c();
  summary["mean"] = pi.mean();
  summary["mean_closed_form"] = params.mean();
  summary["tail_mass"] = pi.tail_mass();
  summary["support_size"] = pi.size();
  summary["pi0"] = series_json(pi0);
  summary["persistence_time"] = tau.value.value;
  summary["ln_persistence"] = series_json(tau.ln_value);
  if (tau.bounds_available) {
    summary["bounds"] = json{{"ln_lower", tau.ln_lower}, {"ln_upper", tau.ln_upper}};
  } else {
    summary["bounds"] = nullptr;
  }
  if (power) {
    const PowerIteration it = stationary_by_power_iteration(params, budget);
    const TvResult tv = tv_distance(it.pmf, pi);
    summary["power_iteration"] = json{{"iterations", it.iterations},
                                      {"converged", it.converged},
                                      {"last_change", it.last_change},
                                      {"tv_to_product", tv.value},
                                      {"tv_error_bound", tv.error_bound}};
  }
  if (kac_samples > 0) {
    if (tau.value.value < 1e6) {
      const MeanEstimate est =
          extinction_time_monte_carlo(0, params, kac_samples, kac_cap, ctx.plan);
      summary["kac"] = json{{"mean", est.mean},
                            {"std_error", est.std_error},
                            {"samples", est.samples},
                            {"censored", est.censored}};
    } else {
      summary["kac"] = json{{"declined", "persistence time above 1e6"}};
    }
  }
  cli::write_json(ctx.out_dir / "summary.json", summary);
  return {"pi.csv", "summary.json"};
}

Outputs run_tv(Config& cfg, const Context& ctx) {
  const ModelParams params = read_params(cfg);
  const Count x = cfg.count("x");
  const Count y = cfg.count("y");
  const double budget = cfg.number("truncation", kDefaultTruncation);
  std::vector<Count> times;
  if (cfg.has("times")) {
    times = cfg.counts("times", {});
  } else {
    const Count t_max = cfg.count("t_max", 100);
    const Count stride = cfg.count("stride", 1);
    if (stride == 0) throw InvalidArgument("'stride' must be positive");
    for (Count t = 0; t <= t_max; t += stride) times.push_back(t);
  }
  const Count paths = cfg.count("coupling_paths", 0);
  cfg.finish();
  if (!std::is_sorted(times.begin(), times.end())) {
    throw InvalidArgument("'times' must be sorted");
  }
  if (x >= y) throw InvalidArgument("need x < y");

  const std::vector<TvRow> rows = tv_table(x, y, times, params, budget);
  CsvWriter csv(ctx.out_dir / "tv.csv", {"t", "tv_lower", "tv_exact", "tv_exact_err", "tv_upper"});
  for (const TvRow& r : rows) csv.row(r.t, r.lower, r.exact, r.exact_err, r.upper);
  csv.close();
  Outputs out{"tv.csv"};
  if (paths > 0) {
    const Count gap = y - x;
    CsvWriter cc(ctx.out_dir / "coupling.csv",
                 {"t", "tail_exact", "tail_upper", "tail_mc", "tail_mc_se"});
    for (Count t : times) {
      const TailEstimate est = coupling_tail_monte_carlo(gap, t, params, paths, ctx.plan);
      cc.row(t, coupling_tail_exact(gap, t, params), coupling_tail_upper(gap, t, params).clamped,
             est.fraction(), est.std_error());
    }
    cc.close();
    out.push_back("coupling.csv");
  }
  return out;
}

Outputs run_cutoff(Config& cfg, const Context& ctx) {
  const double beta = cfg.number("beta", 0.4);
  const double epsilon = cfg.number("epsilon", 0.1);
  const std::string schedule = cfg.text("schedule", "sqrt");
  const std::vector<Count> ns = cfg.counts("ns", {64, 256, 1024});
  const std::vector<double> grid =
      cfg.numbers("scaled_grid", {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0});
  const std::vector<double> thetas = cfg.numbers("theta_list", {2.0, 5.0});
  const double budget = cfg.number("truncation", kDefaultTruncation);
  cfg.finish();
  if (schedule != "sqrt") throw InvalidArgument("unknown schedule '" + schedule + "'");
  const CutoffFamily family = CutoffFamily::sqrt_schedule(beta, epsilon);
  for (Count n : ns) family.at(static_cast<double>(n));

  const std::vector<ProfileRow> profile = cutoff_profile(family, ns, grid, budget);
  CsvWriter prof(ctx.out_dir / "profile.csv", {"n", "t", "u", "d", "err"});
  for (const ProfileRow& r : profile) prof.row(r.n, r.t, r.u, r.d, r.err);
  prof.close();

  CsvWriter lim(ctx.out_dir / "limits.csv",
                {"n", "tv_to_poisson", "tv_error", "mean_gap", "t_n", "b_n"});
  CsvWriter thr(ctx.out_dir / "thresholds.csv",
                {"n", "theta", "lambda", "d_at_lambda", "d_err", "nu_valid", "nu", "gamma"});
  for (Count n : ns) {
    const double nd = static_cast<double>(n);
    const TvResult tv = poisson_limit_check(nd, family, budget);
    const ModelParams params = family.params(nd);
    lim.row(n, tv.value, tv.error_bound, std::fabs(params.mean() - beta),
            cutoff_time(nd, family), window(nd, family));
    for (double theta : thetas) {
      const CutoffThresholds* th = nullptr;
      CutoffThresholds values{};
      bool nu_valid = true;
      try {
        values = cutoff_thresholds(nd, theta, family);
        th = &values;
      } catch (const NumericalFault&) {
        nu_valid = false;
        values.lambda = (std::log(family.at(nd).y) + theta) / family.at(nd).c;
      }
      const std::vector<Count> at{round_time(values.lambda)};
      const std::vector<DistancePoint> d = distance_curve(nd, family, at, budget);
      thr.row(n, theta, values.lambda, d.front().d, d.front().err, nu_valid ? 1 : 0,
              th ? th->nu : 0.0, th ? th->gamma : 0.0);
    }
  }
  lim.close();
  thr.close();
  return {"profile.csv", "limits.csv", "thresholds.csv"};
}

enum class Route { automatic, series, linear_solve };

Route parse_route(const std::string& name) {
  if (name == "auto") return Route::automatic;
  if (name == "series") return Route::series;
  if (name == "linear_solve") return Route::linear_solve;
  throw InvalidArgument("unknown route '" + name + "' (auto, series or linear_solve)");
}

// a_n for each requested n at one s. The automatic route lifts the series
// when its tracked error allows and falls back to the bracketed linear solve;
// the series route lets a series fault propagate.
json pgf_block(double s, const ModelParams& params, double tol,
               const std::vector<Count>& n_values, Route route) {
  EtaSeriesParams series;
  series.s = s;
  series.tol = tol;
  json block;
  block["s"] = s;
  bool series_ok = route != Route::linear_solve;
  if (route == Route::series) {
    block["a1"] = series_json(pgf_tau_from_one(params, series));
  } else {
    try {
      block["a1"] = series_json(pgf_tau_from_one(params, series));
    } catch (const NumericalFault& e) {
      series_ok = false;
      block["a1"] = json{{"fault", e.what()}};
    }
  }
  const Count n_max =
      n_values.empty() ? 1 : *std::max_element(n_values.begin(), n_values.end());
  std::optional<LinearSolveResult> solve;
  auto solved = [&]() -> const LinearSolveResult& {
    if (!solve) {
      Count K = n_max + 100;
      while (true) {
        LinearSolveResult r = pgf_tau_linear_solve_unchecked(n_max, s, params, K);
        if (r.width(n_max) <= 1e-12 || K >= 2000) {
          solve = pgf_tau_linear_solve(n_max, s, params, K);
          break;
        }
        K = std::min<Count>(K * 2, 2000);
      }
    }
    return *solve;
  };
  json rows = json::array();
  for (Count n : n_values) {
    json row{{"n", n}};
    bool done = false;
    if (route == Route::series) {
      const SeriesResult r = pgf_tau_from_n(n, params, series);
      row["value"] = r.value;
      row["error_bound"] = r.error_bound;
      row["route"] = "series";
      done = true;
    } else if (series_ok) {
      try {
        const SeriesResult r = pgf_tau_from_n(n, params, series);
        if (r.error_bound <= 1e-8) {
          row["value"] = r.value;
          row["error_bound"] = r.error_bound;
          row["route"] = "series";
          done = true;
        }
      } catch (const NumericalFault&) {
      }
    }
    if (!done) {
      const LinearSolveResult& r = solved();
      row["value"] = r.value(n);
      row["error_bound"] = 0.5 * r.width(n);
      row["route"] = "linear_solve";
    }
    rows.push_back(row);
  }
  block["a_n"] = rows;
  return block;
}

Outputs run_extinction(Config& cfg, const Context& ctx) {
  const ModelParams params = read_params(cfg);
  const std::vector<double> s_values = cfg.numbers("s_values", {0.3, 0.5, 0.8});
  const std::vector<Count> n_values = cfg.counts("n_values", {1, 2, 3, 5, 10});
  const double tol = cfg.number("series_tol", kDefaultSeriesTol);
  const Route route = parse_route(cfg.text("route", "auto"));
  const Count mc_paths = cfg.count("mc_paths", 0);
  const Count t_cap = cfg.count("t_cap", 100'000);
  std::optional<Config> scaling;
  std::vector<Count> scaling_ns;
  Count reps = 0;
  if (cfg.has_section("scaling")) {
    scaling.emplace(cfg.section("scaling"));
    scaling_ns = scaling->counts("ns", {10, 1000, 1000000});
    reps = scaling->count("reps", 10000);
    cfg.store_section("scaling", *scaling);
  }
  cfg.finish();
  if (params.c() >= 1.0 && !scaling_ns.empty()) {
    throw InvalidArgument("the scaling experiment needs c < 1");
  }
  for (Count n : scaling_ns) {
    if (n < 2) throw InvalidArgument("scaling ns must be at least 2");
  }

  json doc;
  doc["p"] = params.p();
  doc["c"] = params.c();
  doc["persistence_time"] = persistence_time(params).value.value;
  json pgf = json::array();
  for (double s : s_values) {
    json block = pgf_block(s, params, tol, n_values, route);
    if (mc_paths > 0) {
      json mc = json::array();
      for (Count n : n_values) {
        const double one[] = {s};
        const PgfMonteCarlo est = pgf_tau_monte_carlo(n, one, params, mc_paths, t_cap, ctx.plan);
        mc.push_back(json{{"n", n},
                          {"mean", est.estimates.front().mean},
                          {"std_error", est.estimates.front().std_error},
                          {"censored", est.censored},
                          {"censoring_bias", est.censoring_bias}});
      }
      block["monte_carlo"] = mc;
    }
    pgf.push_back(block);
  }
  doc["pgf"] = pgf;
  cli::write_json(ctx.out_dir / "extinction.json", doc);
  Outputs out{"extinction.json"};

  if (!scaling_ns.empty()) {
    const std::vector<ScalingRow> rows = tau_scaling_experiment(params, scaling_ns, reps, ctx.plan);
    CsvWriter csv(ctx.out_dir / "scaling.csv",
                  {"n", "d_n", "samples", "censored", "xi_q10", "xi_q50", "xi_q90", "tau_q10",
                   "tau_q50", "tau_q90"});
    CsvWriter rho(ctx.out_dir / "rho.csv", {"n", "rho", "probability"});
    for (const ScalingRow& r : rows) {
      if (r.xi.empty()) throw NumericalFault("every scaling path was censored");
      csv.row(r.n, r.dn, r.xi.size(), r.censored, r.xi_ratio_quantile(0.1),
              r.xi_ratio_quantile(0.5), r.xi_ratio_quantile(0.9), r.tau_ratio_quantile(0.1),
              r.tau_ratio_quantile(0.5), r.tau_ratio_quantile(0.9));
      const Pmf law = r.rho_law();
      for (std::size_t k = 0; k < law.size(); ++k) {
        if (law[k] > 0.0) rho.row(r.n, k, law[k]);
      }
    }
    csv.close();
    rho.close();
    out.push_back("scaling.csv");
    out.push_back("rho.csv");
  }
  return out;
}

Outputs run_branching(Config& cfg, const Context& ctx) {
  const double beta = cfg.number("beta", 0.5);
  const std::vector<double> ms = cfg.numbers("ms", {10.0, 100.0, 1000.0, 10000.0});
  const double p = cfg.number("p", 0.4);
  const double c = cfg.number("c", 0.1);
  const std::vector<double> s_grid = cfg.numbers("s_grid", {0.0, 0.25, 0.5, 0.75, 1.0});
  const double budget = cfg.number("truncation", kDefaultTruncation);
  const double tol = cfg.number("series_tol", kDefaultSeriesTol);
  cfg.finish();
  const ModelParams params(p, c);

  const std::vector<RareSevereRow> rows = rare_severe_limit_check(beta, ms, budget);
  CsvWriter csv(ctx.out_dir / "branching.csv",
                {"m", "p_m", "c_m", "tv_to_poisson", "tv_error", "mean_A"});
  for (const RareSevereRow& r : rows) csv.row(r.m, r.p, r.c, r.tv, r.tv_error, r.mean);
  csv.close();

  const Pmf pi = stationary_pmf(params, budget);
  json samples = json::array();
  for (double s : s_grid) {
    const SeriesResult z = z_inf_pgf(s, params, tol);
    samples.push_back(json{{"s", s},
                           {"z_inf_pgf", z.value},
                           {"error_bound", z.error_bound},
                           {"terms", z.terms_used},
                           {"pi_pgf", pi.pgf(s)},
                           {"pi_pgf_from_z", z.value * (1.0 - p) / (1.0 - p * s)}});
  }
  cli::write_json(ctx.out_dir / "pgf.json", json{{"p", p}, {"c", c}, {"samples", samples}});
  return {"branching.csv", "pgf.json"};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"simulate", "stationary", "tv",
                                              "cutoff", "extinction", "branching"};
  return names;
}

void run_config(const json& raw_config, const fs::path& out_dir, const RunOptions& options) {
  json config = raw_config;
  if (config.is_object() && config.contains("config") && config.contains("config_sha256")) {
    config = config.at("config");  // a manifest from an earlier run
  }
  if (!config.is_object()) throw InvalidArgument("config must be a JSON object");
  std::string experiment = options.experiment;
  if (config.contains("experiment")) {
    if (!config.at("experiment").is_string()) {
      throw InvalidArgument("'experiment' must be a string");
    }
    const std::string named = config.at("experiment").get<std::string>();
    if (!experiment.empty() && named != experiment) {
      throw InvalidArgument("config is for '" + named + "', not '" + experiment + "'");
    }
    experiment = named;
    config.erase("experiment");
  }
  if (experiment.empty()) throw InvalidArgument("config names no experiment");
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end()) {
    throw InvalidArgument("unknown experiment '" + experiment + "'");
  }

  Config cfg(config);
  Context ctx{out_dir, read_plan(cfg, options)};
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw InvalidArgument("cannot create output directory " + out_dir.string());

  const auto start = std::chrono::steady_clock::now();
  Outputs files;
  if (experiment == "simulate") files = run_simulate(cfg, ctx);
  else if (experiment == "stationary") files = run_stationary(cfg, ctx);
  else if (experiment == "tv") files = run_tv(cfg, ctx);
  else if (experiment == "cutoff") files = run_cutoff(cfg, ctx);
  else if (experiment == "extinction") files = run_extinction(cfg, ctx);
  else files = run_branching(cfg, ctx);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json resolved = cfg.resolved();
  resolved["experiment"] = experiment;
  json outputs = json::array();
  for (const std::string& name : files) {
    outputs.push_back(json{{"file", name}, {"sha256", sha256_hex(read_file(out_dir / name))}});
  }
  json manifest;
  manifest["artifact"] = "bincat";
  manifest["version"] = BINCAT_VERSION;
  manifest["experiment"] = experiment;
  manifest["config_sha256"] = sha256_hex(resolved.dump());
  manifest["seed"] = ctx.plan.base_seed;
  manifest["tasks"] = ctx.plan.tasks;
  manifest["threads"] = ctx.plan.threads;
  manifest["wall_time_seconds"] = wall;
  manifest["outputs"] = outputs;
  manifest["config"] = resolved;
  cli::write_json(out_dir / "manifest.json", manifest);
}

int run(const fs::path& config_path, const fs::path& out_dir, const RunOptions& options,
        std::ostream& err) {
  try {
    json config;
    try {
      config = json::parse(read_file(config_path));
    } catch (const json::parse_error& e) {
      throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    run_config(config, out_dir, options);
    return 0;
  } catch (const InvalidArgument& e) {
    err << "invalid config: " << e.what() << '\n';
    return 1;
  } catch (const NumericalFault& e) {
    err << "numerical fault: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    err << "invalid config: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace bincat
