#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bincat/model.hpp"
#include "bincat/parallel.hpp"
#include "bincat/pmf.hpp"
#include "bincat/types.hpp"

namespace bincat {

/// Evaluation point and series bookkeeping for the extinction-time
/// generating function.
struct EtaSeriesParams {
  double s = 0.5;
  double tol = kDefaultSeriesTol;
  std::size_t max_terms = 2000;

  /// Throws InvalidArgument unless 0 < s < 1, tol > 0, max_terms > 0.
  void validate() const;
};

struct ExtinctionSample {
  Count t = 0;
  bool censored = false;
};

/// First t >= 1 with X_t = 0 started from x0, or {t_cap, censored}.
ExtinctionSample extinction_time_sample(Count x0, const ModelParams& params, Engine& rng,
                                        Count t_cap);

/// eta_0 = 1 and, for n >= 1,
/// (-1)^n (1-c)^{n(n-1)/2} ((1-p)s/(1-ps))^n prod_{k=1}^n 1/(1-(1-c)^k),
/// evaluated as sign times exp(log-magnitude).
double eta_n(Count n, double s, const ModelParams& params);

/// E_1[s^tau] = 1 + (1-s)/(ps) - S/D, S = sum_{n>=0} eta_n and
/// D = sum_{n>=0} eta_n h_n(ps), h_n(z) = z(1-c)^n / (1 - (1-(1-c)^n) z).
/// Both series run from n = 0. Evaluated in 100-digit arithmetic; the error
/// bound covers truncation and rounding. Throws NumericalFault when the
/// alternating series cancels beyond the working precision, which happens
/// once (1-p)s/((1-ps)c) is in the hundreds.
SeriesResult pgf_tau_from_one(const ModelParams& params, const EtaSeriesParams& series);

/// E_n[s^tau] by lifting E_1[s^tau] through the first-step relation
/// a_{m+1} = (a_m - (1-p)s sum_k C(m,k) c^{m-k} (1-c)^k a_k) / (ps).
/// The error in a_1 is amplified roughly by (ps)^{-m}; the returned bound
/// tracks that. Throws NumericalFault when an iterate leaves [0,1] by more
/// than its bound.
SeriesResult pgf_tau_from_n(Count n_start, const ModelParams& params,
                            const EtaSeriesParams& series);

/// Largest n_start whose lifted value has error bound <= target, capped at
/// `limit`.
Count max_reliable_n_start(const ModelParams& params, const EtaSeriesParams& series,
                           double target, Count limit = 500);

struct LinearSolveResult {
  /// Solutions for a_0..a_{n_max} under a_{K+1} = 0 and a_{K+1} = a_K.
  std::vector<double> lower;
  std::vector<double> upper;

  double value(Count n) const { return 0.5 * (lower[n] + upper[n]); }
  double width(Count n) const { return upper[n] - lower[n]; }
};

/// Solves the truncated first-step system for a_1..a_K with a_0 = 1, under
/// both closures. Throws InvalidArgument if K < n_max + 10 and NumericalFault
/// if the bracket width at n_max exceeds 1e-6.
LinearSolveResult pgf_tau_linear_solve(Count n_max, double s, const ModelParams& params,
                                       Count K);

/// Same system without the width check, for studying the bracket.
LinearSolveResult pgf_tau_linear_solve_unchecked(Count n_max, double s,
                                                 const ModelParams& params, Count K);

struct PgfEstimate {
  double s = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct PgfMonteCarlo {
  std::vector<PgfEstimate> estimates;
  Count paths = 0;
  Count censored = 0;
  /// Largest s^t_cap: bound on the bias from scoring censored paths as 0.
  double censoring_bias = 0.0;
};

/// Monte Carlo E_n[s^tau] for several s from one set of extinction times.
PgfMonteCarlo pgf_tau_monte_carlo(Count n_start, std::span<const double> s_values,
                                  const ModelParams& params, Count paths, Count t_cap,
                                  const ShardPlan& plan);

/// h(z) = (z - cz) / (1 - cz).
double h_map(double z, double c);

/// k-fold iterate of h in closed form: z(1-c)^k / (1 - (1-(1-c)^k) z).
double h_iterate(Count k, double z, double c);

/// Right-hand side of the fixed-point identity at z = ps:
/// sum_{n>=0} g(h_n(ps)) eta_n with g(w) = ps - w + w (ps a_1 + (1-p)s).
/// Vanishes when a1 = E_1[s^tau]. The sum is alternating with terms as large
/// as the eta_n, so for small c the rounding of a1 itself shows up here
/// multiplied by max |eta_n|.
double fixed_point_residual(double s, const ModelParams& params, double a1,
                            double tol = kDefaultSeriesTol);

/// d_n = -ln n / ((1-p) ln(1-c)). Throws InvalidArgument for c = 1 or n = 0.
double dn_scale(Count n, const ModelParams& params);

struct ScalingRow {
  Count n = 0;
  double dn = 0.0;
  std::vector<double> xi;   // gap-vanishing times
  std::vector<double> tau;  // extinction times of the upper copy
  Count censored = 0;

  /// Empirical law of rho = tau - xi.
  Pmf rho_law() const;
  /// Type-7 quantile of xi / d_n and tau / d_n.
  double xi_ratio_quantile(double prob) const;
  double tau_ratio_quantile(double prob) const;
};

/// For each n, runs `reps` coupled pairs started at (0, n) and records xi,
/// tau and rho. Paths still alive at t_cap are dropped and counted.
std::vector<ScalingRow> tau_scaling_experiment(const ModelParams& params,
                                               std::span<const Count> ns, Count reps,
                                               const ShardPlan& plan,
                                               Count t_cap = 100'000'000);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  Count samples = 0;
  Count censored = 0;
};

/// Monte Carlo E_{x0}[tau], censored paths contributing t_cap.
MeanEstimate extinction_time_monte_carlo(Count x0, const ModelParams& params, Count samples,
                                         Count t_cap, const ShardPlan& plan);

/// Type-7 sample quantile.
double sample_quantile(std::vector<double> values, double prob);

}  // namespace bincat
