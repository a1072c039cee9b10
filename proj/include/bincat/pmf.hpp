#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "bincat/model.hpp"
#include "bincat/types.hpp"

namespace bincat {

/// Probability mass function on {0, ..., K} plus the mass lost beyond K.
///
/// Engine operations only ever drop mass, and whatever they drop is
/// accounted in tail_mass(): the stored entries are within tail_mass() of the
/// represented law in total variation.
class Pmf {
 public:
  /// Unit mass at 0.
  Pmf();

  /// Throws InvalidArgument on negative or non-finite entries, a negative
  /// tail, or total mass more than 1e-9 away from 1. Trailing zeros are
  /// dropped.
  explicit Pmf(std::vector<double> probs, double tail_mass = 0.0);

  static Pmf delta(Count x);

  /// Number of stored entries, K + 1.
  std::size_t size() const noexcept { return probs_.size(); }

  /// Largest stored state K.
  Count max_state() const noexcept { return probs_.size() - 1; }

  /// P(k) for stored k, 0 beyond.
  double operator[](Count k) const noexcept {
    return k < probs_.size() ? probs_[k] : 0.0;
  }

  std::span<const double> probs() const noexcept { return probs_; }
  double tail_mass() const noexcept { return tail_mass_; }

  /// Sum of the stored entries.
  double mass() const;

  /// Mean over the stored entries.
  double mean() const;

  /// Generating function sum_k P(k) s^k over the stored entries.
  double pgf(double s) const;

  /// Folds trailing entries into the tail while the tail stays <= budget.
  Pmf truncated(double budget) const;

 private:
  friend Pmf make_pmf_unchecked(std::vector<double>, double, double);
  struct Unchecked {};
  Pmf(Unchecked, std::vector<double> probs, double tail_mass);

  std::vector<double> probs_;
  double tail_mass_ = 0.0;
};

/// Builds a Pmf from engine output without validation, dropping trailing
/// zeros and folding tail entries under `budget`.
Pmf make_pmf_unchecked(std::vector<double> probs, double tail_mass, double budget);

/// Total variation distance computed on stored entries, with the bound
/// |true - value| <= error_bound = (a.tail + b.tail) / 2.
struct TvResult {
  double value = 0.0;
  double error_bound = 0.0;
};

/// Rows of the Binomial(i, q) pmf for i = 0, 1, ..., grown on demand.
///
/// Rows are built by the multiplicative recurrence outward from the mode and
/// renormalised to sum 1; entries below 1e-300 of the modal value are
/// dropped, so each row is stored as a contiguous window [lo, lo + len).
class ThinningKernel {
 public:
  explicit ThinningKernel(double q);

  double q() const noexcept { return q_; }

  struct Row {
    Count lo;
    std::span<const double> values;
  };

  /// Row i; grows the cache when needed. Not thread-safe.
  Row row(Count i);

  /// Makes rows 0..n available.
  void reserve_rows(Count n);

 private:
  void build_row(Count i);

  double q_;
  std::vector<Count> lo_;
  std::vector<std::size_t> offset_;  // offset_[i] .. offset_[i+1] into data_
  std::vector<double> data_;
};

/// Repeated application of the transition kernel with a cached binomial
/// table; the unit of work behind evolve(), power iteration, distance curves
/// and the tilted-chain lower bound.
class Evolver {
 public:
  explicit Evolver(const ModelParams& params, double budget = kDefaultTruncation);

  const ModelParams& params() const noexcept { return params_; }
  double budget() const noexcept { return budget_; }

  /// Image of `dist` under one transition.
  Pmf step(const Pmf& dist);

  /// `steps` transitions.
  Pmf run(Pmf dist, Count steps);

 private:
  ModelParams params_;
  double budget_;
  ThinningKernel catastrophe_;
};

/// Unit mass at x.
Pmf delta(Count x);

/// One step of the chain applied to a law: p dist(j-1) + (1-p) sum_i dist(i) Bin(i,1-c)(j).
Pmf evolve(const Pmf& dist, const ModelParams& params,
           double budget = kDefaultTruncation);

/// Law of Bin(R, keep) for R ~ dist.
Pmf binomial_thin(const Pmf& dist, double keep, double budget = kDefaultTruncation);

/// Law of the independent sum; tail masses add.
Pmf convolve(const Pmf& a, const Pmf& b, double budget = kDefaultTruncation);

/// Geom^-(alpha): P(k) = (1 - alpha)^k alpha, truncated with tail < budget.
/// Throws InvalidArgument unless 0 < alpha <= 1.
Pmf geom_minus(double alpha, double budget = kDefaultTruncation);

/// Poisson(beta) truncated with tail < budget. Throws for beta < 0.
Pmf poisson(double beta, double budget = kDefaultTruncation);

TvResult tv_distance(const Pmf& a, const Pmf& b);

/// Empirical law of integer samples.
Pmf empirical_pmf(std::span<const Count> samples);

void to_json(nlohmann::json& j, const Pmf& pmf);
void from_json(const nlohmann::json& j, Pmf& pmf);

}  // namespace bincat
