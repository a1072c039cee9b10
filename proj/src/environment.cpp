#include "bincat/environment.hpp"

#include <cmath>

#include "bincat/errors.hpp"
#include "bincat/stationary.hpp"

namespace bincat {

void Environment::validate() const {
  for (std::uint8_t w : omega) {
    if (w > 1) throw InvalidArgument("environment entries must be 0 or 1");
  }
}

Environment sample_environment(Count T, double p, Engine& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0,1]");
  Environment env;
  env.p = p;
  env.omega.resize(T);
  for (Count t = 0; t < T; ++t) env.omega[t] = bernoulli(rng, p) ? 1 : 0;
  return env;
}

std::vector<Count> regeneration_times(const Environment& env) {
  env.validate();
  std::vector<Count> times;
  for (std::size_t t = 0; t < env.omega.size(); ++t) {
    if (env.omega[t] == 0) times.push_back(static_cast<Count>(t) + 1);
  }
  return times;
}

Count sampled_chain_step(Count z, Count r, double c, Engine& rng) {
  if (!(c > 0.0 && c <= 1.0)) throw InvalidArgument("c must lie in (0,1]");
  return binomial(rng, z + r, 1.0 - c);
}

SeriesResult z_inf_pgf(double s, const ModelParams& params, double tol) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("s must lie in [0,1]");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  const double p = params.p();
  const double q = 1.0 - params.c();
  double log_value = 0.0;
  std::size_t terms = 0;
  double x = p * q / (1.0 - p);  // x_1
  while (true) {
    // sum over the remaining factors of ln(1 + x_k (1-s)) <= x_k (1-s) / c
    const double remaining = x * (1.0 - s) / params.c();
    if (remaining < tol) {
      return SeriesResult{std::exp(-log_value), terms, remaining};
    }
    log_value += std::log1p(x * (1.0 - s));
    x *= q;
    ++terms;
  }
}

Pmf z_inf_pmf(const ModelParams& params, double budget) {
  return geometric_factor_product(params, 1, budget);
}

std::vector<Count> simulate_sampled_chain(Count z0, Count n, const ModelParams& params,
                                          Engine& rng) {
  std::vector<Count> out;
  out.reserve(n);
  Count z = z0;
  for (Count i = 0; i < n; ++i) {
    const Count r = geom_minus(rng, 1.0 - params.p());
    z = sampled_chain_step(z, r, params.c(), rng);
    out.push_back(z);
  }
  return out;
}

std::vector<RareSevereRow> rare_severe_limit_check(double beta, const std::vector<double>& ms,
                                                   double budget) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be non-negative");
  std::vector<RareSevereRow> rows;
  for (double m : ms) {
    if (!(m > 1.0 && m > beta)) throw InvalidArgument("schedule needs m > max(1, beta)");
    const double p = 1.0 - 1.0 / m;
    const double c = 1.0 - beta / m;
    const ModelParams params(p, c);
    const Pmf a = z_inf_pmf(params, budget);
    const Pmf target = beta == 0.0 ? Pmf::delta(0) : poisson(beta, budget);
    const TvResult tv = tv_distance(a, target);
    rows.push_back(RareSevereRow{m, p, c, tv.value, tv.error_bound,
                                 p * (1.0 - c) / ((1.0 - p) * c)});
  }
  return rows;
}

Trajectory quenched_simulate(Count x0, const Environment& env, double c, Engine& rng) {
  env.validate();
  if (!(c > 0.0 && c <= 1.0)) throw InvalidArgument("c must lie in (0,1]");
  Trajectory traj;
  traj.states.reserve(env.omega.size() + 1);
  Count x = x0;
  traj.states.push_back(x);
  for (std::uint8_t w : env.omega) {
    x = w == 1 ? x + 1 : binomial(rng, x, 1.0 - c);
    traj.states.push_back(x);
  }
  return traj;
}

}  // namespace bincat
