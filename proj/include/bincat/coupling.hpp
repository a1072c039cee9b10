#pragma once

#include <span>
#include <vector>

#include "bincat/model.hpp"
#include "bincat/parallel.hpp"
#include "bincat/pmf.hpp"

namespace bincat {

/// Lower copy x and gap h of the monotone coupling; the upper copy is x + h.
struct CoupledState {
  Count x = 0;
  Count h = 0;

  Count upper() const noexcept { return x + h; }
  bool coupled() const noexcept { return h == 0; }
};

/// Shared birth with probability p; otherwise independent binomial
/// catastrophes on the lower copy and on the gap.
CoupledState coupled_step(CoupledState state, const ModelParams& params, Engine& rng);

/// P(xi > t) for two copies started `gap` apart:
/// sum_k Bin(t, 1-p)(k) [1 - (1 - (1-c)^k)^gap].
double coupling_tail_exact(Count gap, Count t, const ModelParams& params);

struct TailBound {
  double raw = 0.0;      // gap * alpha^t
  double clamped = 0.0;  // min(raw, 1)
};

TailBound coupling_tail_upper(Count gap, Count t, const ModelParams& params);

struct TailEstimate {
  Count uncoupled = 0;
  Count paths = 0;

  double fraction() const;
  double std_error() const;
};

/// Fraction of simulated coupled pairs with xi > t.
TailEstimate coupling_tail_monte_carlo(Count gap, Count t, const ModelParams& params,
                                       Count paths, const ShardPlan& plan);

/// |y - x| alpha^t.
double tv_upper(Count x, Count y, Count t, const ModelParams& params);

/// (sum_y |y - x| pi(y)) alpha^t using the supplied stationary law; for x = 0
/// this is mu alpha^t.
double tv_upper_stationary(Count x, Count t, const ModelParams& params, const Pmf& pi);

/// TV between the laws at time t from x and from y.
TvResult tv_exact(Count x, Count y, Count t, const ModelParams& params,
                  double budget = kDefaultTruncation);

struct TvLowerBound {
  /// Valid lower bound on d_t(x, y).
  double value = 0.0;
  /// Truncated mass that the computed maximum could be missing.
  double slack = 0.0;
};

/// alpha^t max_j sum_{k=x}^{y-1} P_k^{tilted}(X_t = j). Requires x < y and
/// c < 1.
TvLowerBound tv_lower(Count x, Count y, Count t, const ModelParams& params,
                      double budget = kDefaultTruncation);

struct TvRow {
  Count t = 0;
  double lower = 0.0;
  double exact = 0.0;
  double exact_err = 0.0;
  double upper = 0.0;
};

/// Lower bound, exact distance and upper bound at each of the sorted
/// `times`, evolving incrementally. The lower bound is reported as 0 when
/// c = 1.
std::vector<TvRow> tv_table(Count x, Count y, std::span<const Count> times,
                            const ModelParams& params,
                            double budget = kDefaultTruncation);

struct ConditionalLaw {
  Pmf law;
  Count retained = 0;
  Count paths = 0;
};

/// Empirical law of X_t among coupled pairs started at (x, y) that have not
/// coupled by time t. Throws NumericalFault when fewer than 100 pairs are
/// retained.
ConditionalLaw conditional_law_given_uncoupled(Count x, Count y, Count t,
                                               const ModelParams& params, Count paths,
                                               const ShardPlan& plan);

/// 1 - alpha = c(1-p).
double spectral_gap(const ModelParams& params);

}  // namespace bincat
