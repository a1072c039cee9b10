#include "bincat/stationary.hpp"

#include <cmath>

#include "bincat/errors.hpp"

namespace bincat {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Mean of factor k, p (1-c)^k / (1-p).
double factor_mean(const ModelParams& params, Count k) {
  return params.p() * std::pow(1.0 - params.c(), static_cast<double>(k)) /
         (1.0 - params.p());
}

// Sum over j >= from of factor means; zero when c = 1 and from >= 1.
double residual_mean(const ModelParams& params, Count from) {
  return factor_mean(params, from) / params.c();
}

// ln of the product over j >= 0 of (1 + x_j), with the bound on the
// neglected part.
SeriesResult log_persistence(const ModelParams& params, double tol) {
  CompensatedSum acc;
  Count j = 0;
  while (true) {
    const double remainder = residual_mean(params, j);
    if (remainder <= tol || j > 100'000'000) {
      return SeriesResult{acc.value(), static_cast<std::size_t>(j), remainder};
    }
    acc.add(std::log1p(factor_mean(params, j)));
    ++j;
  }
}

}  // namespace

double factor_ratio(const ModelParams& params, Count k) {
  const double keep = std::pow(1.0 - params.c(), static_cast<double>(k));
  return params.p() * keep / (1.0 - params.p() * (1.0 - keep));
}

Pmf geometric_factor_product(const ModelParams& params, Count first, double budget) {
  // Number of factors so that the neglected ones carry mean < budget / 10.
  Count last = first;
  while (residual_mean(params, last) >= budget / 10.0) ++last;
  const double neglected = residual_mean(params, last);
  const Count factors = last - first;
  const double per_factor = factors == 0 ? 0.0 : budget / (10.0 * static_cast<double>(factors));

  Pmf acc = Pmf::delta(0);
  for (Count k = first; k < last; ++k) {
    const double r = factor_ratio(params, k);
    if (r <= 0.0) break;
    acc = convolve(acc, geom_minus(1.0 - r, per_factor), budget);
  }
  return make_pmf_unchecked(std::vector<double>(acc.probs().begin(), acc.probs().end()),
                            acc.tail_mass() + neglected, budget);
}

Pmf stationary_pmf(const ModelParams& params, double budget) {
  return geometric_factor_product(params, 0, budget);
}

double stationary_mean(const ModelParams& params) { return params.mean(); }

SeriesResult pi_zero(const ModelParams& params, double tol) {
  const SeriesResult log_sum = log_persistence(params, tol);
  const double value = std::exp(-log_sum.value);
  // true value = value * exp(-R) with 0 <= R <= log_sum.error_bound
  return SeriesResult{value, log_sum.terms_used, value * -std::expm1(-log_sum.error_bound)};
}

PersistenceTime persistence_time(const ModelParams& params, double tol) {
  PersistenceTime out;
  out.ln_value = log_persistence(params, tol);
  const double value = std::exp(out.ln_value.value);
  out.value = SeriesResult{value, out.ln_value.terms_used,
                           value * std::expm1(out.ln_value.error_bound)};
  const double p = params.p();
  const double c = params.c();
  if (p < 0.5) {
    const double keep2 = (1.0 - c) * (1.0 - c);
    out.bounds_available = true;
    out.ln_upper = params.mean();
    out.ln_lower = params.mean() -
                   0.5 * p * p / ((1.0 - p) * (1.0 - p) * (1.0 - keep2));
  }
  return out;
}

Pmf tilted_stationary_pmf(const ModelParams& params, double budget) {
  return stationary_pmf(params.tilted(), budget);
}

PowerIteration stationary_by_power_iteration(const ModelParams& params, double budget,
                                             double tol, Count max_steps) {
  Evolver evolver(params, budget);
  PowerIteration out{Pmf::delta(0), 0, 1.0, false};
  for (Count t = 0; t < max_steps; ++t) {
    Pmf next = evolver.step(out.pmf);
    out.last_change = tv_distance(next, out.pmf).value;
    out.pmf = std::move(next);
    out.iterations = t + 1;
    if (out.last_change < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace bincat
