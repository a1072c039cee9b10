#pragma once

#include <cstdint>
#include <vector>

#include "bincat/model.hpp"
#include "bincat/pmf.hpp"
#include "bincat/types.hpp"

namespace bincat {

/// Birth/catastrophe sequence driving the chain: omega[t] = 1 means the step
/// from time t to t+1 is a birth, 0 means a binomial catastrophe.
struct Environment {
  std::vector<std::uint8_t> omega;
  double p = 0.0;

  /// Throws InvalidArgument if an entry is not 0 or 1.
  void validate() const;
};

/// T independent Bernoulli(p) draws.
Environment sample_environment(Count T, double p, Engine& rng);

/// Catastrophe times T_1 < T_2 < ..., counting steps from 1 (so omega[t] = 0
/// gives time t + 1).
std::vector<Count> regeneration_times(const Environment& env);

/// Population just after a catastrophe, given z individuals after the
/// previous one and r births in between: Binomial(z + r, 1 - c).
Count sampled_chain_step(Count z, Count r, double c, Engine& rng);

/// E[s^{Z_inf}] = prod_{k>=1} 1 / (1 + x_k (1 - s)), x_k = p(1-c)^k/(1-p).
/// Stops once the remaining log-factors sum to less than tol.
SeriesResult z_inf_pgf(double s, const ModelParams& params, double tol = kDefaultSeriesTol);

/// Law of Z_inf as the product of geometric factors k >= 1.
Pmf z_inf_pmf(const ModelParams& params, double budget = kDefaultTruncation);

/// Long-run simulation of Z from z0: records Z_1..Z_n, with the birth count
/// between catastrophes drawn as Geom^-(1 - p).
std::vector<Count> simulate_sampled_chain(Count z0, Count n, const ModelParams& params,
                                          Engine& rng);

struct RareSevereRow {
  double m = 0.0;
  double p = 0.0;
  double c = 0.0;
  double tv = 0.0;        // TV(A_m, Pois(beta))
  double tv_error = 0.0;  // truncation error of tv
  double mean = 0.0;      // sum_{k>=1} x_k = p(1-c)/((1-p)c)
};

/// For each m, the law of A_m (the k >= 1 factor product at
/// p_m = 1 - 1/m, c_m = 1 - beta/m) and its distance to Pois(beta).
/// beta = 0 gives c_m = 1 and A_m = delta(0).
std::vector<RareSevereRow> rare_severe_limit_check(double beta, const std::vector<double>& ms,
                                                   double budget = kDefaultTruncation);

/// Runs the chain with births and catastrophes dictated by env.
Trajectory quenched_simulate(Count x0, const Environment& env, double c, Engine& rng);

}  // namespace bincat
