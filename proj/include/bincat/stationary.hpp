#pragma once

#include "bincat/model.hpp"
#include "bincat/pmf.hpp"
#include "bincat/types.hpp"

namespace bincat {

/// Success-odds parameter of the k-th geometric factor of the stationary
/// law: r_k = p(1-c)^k / (1 - p(1 - (1-c)^k)). Factor k is Geom^-(1 - r_k)
/// and has mean r_k / (1 - r_k) = p(1-c)^k / (1-p).
double factor_ratio(const ModelParams& params, Count k);

/// Convolution of the geometric factors k = first, first+1, ... . The factor
/// list is cut once the neglected factors' total mean drops below budget/10;
/// that mean bounds their total-variation effect and is added to the tail.
Pmf geometric_factor_product(const ModelParams& params, Count first,
                             double budget = kDefaultTruncation);

/// The stationary law: all factors from k = 0.
Pmf stationary_pmf(const ModelParams& params, double budget = kDefaultTruncation);

/// p / (c(1-p)).
double stationary_mean(const ModelParams& params);

/// pi(0) as the product over j >= 0 of (1-p) / (1 - p(1 - (1-c)^j)).
SeriesResult pi_zero(const ModelParams& params, double tol = kDefaultSeriesTol);

struct PersistenceTime {
  /// E_0[tau] = 1 / pi(0).
  SeriesResult value;
  /// ln E_0[tau], accumulated in log space; its error bound is additive.
  SeriesResult ln_value;
  /// The log-bracket below is only derived for p < 1/2.
  bool bounds_available = false;
  double ln_lower = 0.0;
  double ln_upper = 0.0;
};

/// Expected return time to 0 from 0, with the logarithmic bracket
/// mu - p^2 / (2 (1-p)^2 (1-(1-c)^2)) <= ln E_0[tau] <= mu when p < 1/2.
PersistenceTime persistence_time(const ModelParams& params,
                                 double tol = kDefaultSeriesTol);

/// Stationary law of the tilted chain (p/alpha, c). Throws InvalidArgument
/// for c = 1.
Pmf tilted_stationary_pmf(const ModelParams& params,
                          double budget = kDefaultTruncation);

struct PowerIteration {
  Pmf pmf;
  Count iterations = 0;
  /// TV between the last two iterates.
  double last_change = 0.0;
  bool converged = false;
};

/// Iterates evolve() from delta(0) until successive iterates are within
/// `tol` in total variation or `max_steps` is reached.
PowerIteration stationary_by_power_iteration(const ModelParams& params,
                                             double budget = kDefaultTruncation,
                                             double tol = 1e-12,
                                             Count max_steps = 1'000'000);

}  // namespace bincat
