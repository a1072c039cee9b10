#include "bincat/extinction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "bincat/coupling.hpp"
#include "bincat/errors.hpp"
#include "bincat/stationary.hpp"

namespace bincat {

namespace {

using Real = boost::multiprecision::cpp_bin_float_100;

const Real& real_eps() {
  static const Real eps = std::numeric_limits<Real>::epsilon();
  return eps;
}

// E_1[s^tau] and a bound on its absolute error, kept in extended precision
// so the lifting recursion can start from it.
struct ExtendedA1 {
  Real value;
  Real error;
  std::size_t terms = 0;
};

// Walks eta_n for n = 0, 1, ... and calls visit(n, eta_n) until the
// remaining terms are below tol relative to the partial sums reported by
// `scale`. Returns {terms, bound on sum of |eta_m| over unvisited m,
// max |eta_n|}.
struct EtaWalk {
  std::size_t terms = 0;
  Real remainder;
  Real max_abs;
};

template <class Visit, class Scale>
EtaWalk walk_eta(double s, const ModelParams& params, const EtaSeriesParams& series,
                 Visit&& visit, Scale&& scale) {
  const Real p = params.p();
  const Real q = Real(1) - Real(params.c());
  const Real rho = (Real(1) - p) * s / (Real(1) - p * s);
  Real eta = 1;
  Real q_pow = 1;  // q^n
  EtaWalk walk;
  walk.max_abs = 1;
  for (std::size_t n = 0; n < series.max_terms; ++n) {
    visit(n, eta, q_pow);
    walk.terms = n + 1;
    // eta_{n+1} = -eta_n rho q^n / (1 - q^{n+1})
    const Real next_q = q_pow * q;
    const Real ratio = rho * q_pow / (Real(1) - next_q);
    const Real next = -eta * ratio;
    walk.max_abs = std::max(walk.max_abs, Real(abs(next)));
    // the ratios decrease in n, so once below 1 the tail is geometric
    if (ratio < Real(0.5)) {
      const Real next_ratio = rho * next_q / (Real(1) - next_q * q);
      const Real bound = abs(next) / (Real(1) - next_ratio);
      if (bound <= Real(series.tol) * scale()) {
        walk.remainder = bound;
        return walk;
      }
    }
    eta = next;
    q_pow = next_q;
  }
  throw NumericalFault("eta series did not converge within " +
                       std::to_string(series.max_terms) + " terms");
}

Real h_real(const Real& z, const Real& q_pow) {
  return z * q_pow / (Real(1) - (Real(1) - q_pow) * z);
}

ExtendedA1 a1_extended(const ModelParams& params, const EtaSeriesParams& series) {
  series.validate();
  const double s = series.s;
  const Real z = Real(params.p()) * s;
  Real S = 0, D = 0;
  const EtaWalk walk = walk_eta(
      s, params, series,
      [&](std::size_t, const Real& eta, const Real& q_pow) {
        S += eta;
        D += eta * h_real(z, q_pow);
      },
      [&] { return std::min(Real(abs(S)), Real(abs(D))); });
  const Real round = Real(4 * walk.terms) * walk.max_abs * real_eps();
  const Real eS = walk.remainder + round;
  const Real eD = walk.remainder + round;
  const Real absD = abs(D);
  if (absD <= 10 * eD) throw NumericalFault(
        "eta series cancels beyond working precision (terms up to 1e" +
        std::to_string(static_cast<long>(log10(walk.max_abs).convert_to<double>())) +
        "); use pgf_tau_linear_solve");
  const Real ratio = S / D;
  const Real ratio_err = (abs(ratio) * eD + eS) / (absD - eD);
  ExtendedA1 out;
  out.value = Real(1) + (Real(1) - Real(s)) / z - ratio;
  out.error = ratio_err + real_eps() * 8;
  out.terms = walk.terms;
  return out;
}

// Lifts a_1 to a_0..a_limit, stopping early (faulted = true) once an
// iterate leaves [0, a_{m-1}] by more than its bound.
struct Lifted {
  std::vector<Real> value;
  std::vector<Real> error;
  bool faulted = false;
};

Lifted lift(const ModelParams& params, double s, const ExtendedA1& a1, Count limit) {
  const Real p = params.p();
  const Real c = params.c();
  const Real q = Real(1) - c;
  const Real ps = p * s;
  const Real leak = (Real(1) - p) * s;
  Lifted out;
  out.value = {Real(1), a1.value};
  out.error = {Real(0), a1.error};
  // weights C(m,k) c^{m-k} q^k for the current m
  std::vector<Real> w{Real(1)};
  for (Count m = 1; m < limit; ++m) {
    std::vector<Real> nw(m + 1, Real(0));
    for (Count k = 0; k <= m; ++k) {
      if (k < m) nw[k] += w[k] * c;
      if (k > 0) nw[k] += w[k - 1] * q;
    }
    w.swap(nw);
    Real mix = 0, mix_err = 0;
    for (Count k = 0; k <= m; ++k) {
      mix += w[k] * out.value[k];
      mix_err += w[k] * out.error[k];
    }
    const Real next = (out.value[m] - leak * mix) / ps;
    const Real next_err =
        (out.error[m] + leak * mix_err) / ps + Real(4 * (m + 2)) * real_eps();
    out.value.push_back(next);
    out.error.push_back(next_err);
    const Real slack = next_err + Real(1e-80);
    if (next < -slack || next > out.value[m] + out.error[m] + slack) {
      out.faulted = true;
      return out;
    }
  }
  return out;
}

std::vector<double> solve_closure(Count K, double s, const ModelParams& params,
                                  bool reflect) {
  const double ps = params.p() * s;
  const double leak = (1.0 - params.p()) * s;
  ThinningKernel weights(1.0 - params.c());
  weights.reserve_rows(K);
  const auto dim = static_cast<Eigen::Index>(K);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  for (Count m = 1; m <= K; ++m) {
    const auto row = static_cast<Eigen::Index>(m - 1);
    A(row, row) += 1.0;
    if (m < K) {
      A(row, row + 1) -= ps;
    } else if (reflect) {
      A(row, row) -= ps;
    }
    const ThinningKernel::Row r = weights.row(m);
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      const Count k = r.lo + i;
      if (k == 0) {
        b(row) += leak * r.values[i];
      } else {
        A(row, static_cast<Eigen::Index>(k - 1)) -= leak * r.values[i];
      }
    }
  }
  const Eigen::VectorXd x = A.partialPivLu().solve(b);
  std::vector<double> out(K + 1);
  out[0] = 1.0;
  for (Count m = 1; m <= K; ++m) out[m] = x(static_cast<Eigen::Index>(m - 1));
  return out;
}

}  // namespace

void EtaSeriesParams::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("s must lie in (0,1)");
  if (!(tol > 0.0)) throw InvalidArgument("series tolerance must be positive");
  if (max_terms == 0) throw InvalidArgument("max_terms must be positive");
}

ExtinctionSample extinction_time_sample(Count x0, const ModelParams& params, Engine& rng,
                                        Count t_cap) {
  Count x = x0;
  for (Count t = 1; t <= t_cap; ++t) {
    x = step_sample(x, params, rng);
    if (x == 0) return ExtinctionSample{t, false};
  }
  return ExtinctionSample{t_cap, true};
}

double eta_n(Count n, double s, const ModelParams& params) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("s must lie in (0,1)");
  if (n == 0) return 1.0;
  const double p = params.p();
  const double q = 1.0 - params.c();
  if (q == 0.0) return n == 1 ? -(1.0 - p) * s / (1.0 - p * s) : 0.0;
  const double nn = static_cast<double>(n);
  double log_mag = 0.5 * nn * (nn - 1.0) * std::log(q) +
                   nn * (std::log1p(-p) + std::log(s) - std::log1p(-p * s));
  for (Count k = 1; k <= n; ++k) {
    log_mag -= std::log1p(-std::pow(q, static_cast<double>(k)));
  }
  const double mag = std::exp(log_mag);
  return n % 2 == 0 ? mag : -mag;
}

SeriesResult pgf_tau_from_one(const ModelParams& params, const EtaSeriesParams& series) {
  const ExtendedA1 a1 = a1_extended(params, series);
  return SeriesResult{a1.value.convert_to<double>(), a1.terms,
                      a1.error.convert_to<double>()};
}

SeriesResult pgf_tau_from_n(Count n_start, const ModelParams& params,
                            const EtaSeriesParams& series) {
  series.validate();
  if (n_start == 0) return SeriesResult{1.0, 0, 0.0};
  const ExtendedA1 a1 = a1_extended(params, series);
  if (n_start == 1) {
    return SeriesResult{a1.value.convert_to<double>(), a1.terms,
                        a1.error.convert_to<double>()};
  }
  const Lifted lifted = lift(params, series.s, a1, n_start);
  if (lifted.faulted) {
    throw NumericalFault("lifting recursion left [0,1] before n = " +
                         std::to_string(n_start) +
                         "; use pgf_tau_linear_solve for this starting point");
  }
  return SeriesResult{lifted.value[n_start].convert_to<double>(), a1.terms,
                      lifted.error[n_start].convert_to<double>()};
}

Count max_reliable_n_start(const ModelParams& params, const EtaSeriesParams& series,
                           double target, Count limit) {
  const ExtendedA1 a1 = a1_extended(params, series);
  if (a1.error > target) return 0;
  const Lifted lifted = lift(params, series.s, a1, std::max<Count>(limit, 1));
  Count best = 1;
  for (Count m = 1; m < lifted.value.size() && m <= limit; ++m) {
    if (lifted.error[m] > target) break;
    if (lifted.faulted && m + 1 == lifted.value.size()) break;
    best = m;
  }
  return best;
}

LinearSolveResult pgf_tau_linear_solve_unchecked(Count n_max, double s,
                                                 const ModelParams& params, Count K) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("s must lie in (0,1)");
  if (K < n_max + 10) throw InvalidArgument("K must be at least n_max + 10");
  std::vector<double> lower = solve_closure(K, s, params, false);
  std::vector<double> upper = solve_closure(K, s, params, true);
  lower.resize(n_max + 1);
  upper.resize(n_max + 1);
  return LinearSolveResult{std::move(lower), std::move(upper)};
}

LinearSolveResult pgf_tau_linear_solve(Count n_max, double s, const ModelParams& params,
                                       Count K) {
  LinearSolveResult out = pgf_tau_linear_solve_unchecked(n_max, s, params, K);
  if (out.width(n_max) > 1e-6) {
    throw NumericalFault("closure bracket wider than 1e-6 at n = " + std::to_string(n_max) +
                         "; increase K");
  }
  return out;
}

PgfMonteCarlo pgf_tau_monte_carlo(Count n_start, std::span<const double> s_values,
                                  const ModelParams& params, Count paths, Count t_cap,
                                  const ShardPlan& plan) {
  for (double s : s_values) {
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("s must lie in (0,1)");
  }
  struct Partial {
    std::vector<double> sum, sum_sq;
    Count censored = 0;
  };
  const std::size_t ns = s_values.size();
  auto shards = run_shards<Partial>(paths, plan, [&](Engine& rng, Count share, std::size_t) {
    Partial part{std::vector<double>(ns, 0.0), std::vector<double>(ns, 0.0), 0};
    for (Count i = 0; i < share; ++i) {
      double t = 0.0;
      bool censored = false;
      if (n_start > 0) {
        const ExtinctionSample e = extinction_time_sample(n_start, params, rng, t_cap);
        t = static_cast<double>(e.t);
        censored = e.censored;
      }
      if (censored) {
        ++part.censored;
        continue;
      }
      for (std::size_t j = 0; j < ns; ++j) {
        const double v = std::pow(s_values[j], t);
        part.sum[j] += v;
        part.sum_sq[j] += v * v;
      }
    }
    return part;
  });
  PgfMonteCarlo out;
  out.paths = paths;
  std::vector<double> sum(ns, 0.0), sum_sq(ns, 0.0);
  for (const Partial& part : shards) {
    out.censored += part.censored;
    for (std::size_t j = 0; j < ns; ++j) {
      sum[j] += part.sum[j];
      sum_sq[j] += part.sum_sq[j];
    }
  }
  const double n = static_cast<double>(std::max<Count>(paths, 1));
  for (std::size_t j = 0; j < ns; ++j) {
    const double mean = sum[j] / n;
    const double var = std::max(0.0, sum_sq[j] / n - mean * mean);
    out.estimates.push_back(PgfEstimate{s_values[j], mean, std::sqrt(var / n)});
    out.censoring_bias =
        std::max(out.censoring_bias, std::pow(s_values[j], static_cast<double>(t_cap)));
  }
  return out;
}

double h_map(double z, double c) { return (z - c * z) / (1.0 - c * z); }

double h_iterate(Count k, double z, double c) {
  const double qk = std::pow(1.0 - c, static_cast<double>(k));
  return z * qk / (1.0 - (1.0 - qk) * z);
}

double fixed_point_residual(double s, const ModelParams& params, double a1, double tol) {
  EtaSeriesParams series;
  series.s = s;
  series.tol = tol;
  series.validate();
  const Real p = params.p();
  const Real z = p * s;
  const Real slope = z * Real(a1) + (Real(1) - p) * s;
  Real total = 0;
  Real scale = 0;
  walk_eta(
      s, params, series,
      [&](std::size_t, const Real& eta, const Real& q_pow) {
        const Real w = h_real(z, q_pow);
        total += eta * (z - w + w * slope);
        scale += abs(eta);
      },
      [&] { return std::max(scale, Real(1)); });
  return total.convert_to<double>();
}

double dn_scale(Count n, const ModelParams& params) {
  if (n == 0) throw InvalidArgument("d_n needs n >= 1");
  if (params.c() >= 1.0) throw InvalidArgument("d_n is undefined for c = 1");
  return -std::log(static_cast<double>(n)) /
         ((1.0 - params.p()) * std::log1p(-params.c()));
}

double sample_quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidArgument("quantile level must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Pmf ScalingRow::rho_law() const {
  std::vector<Count> rho(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) rho[i] = static_cast<Count>(tau[i] - xi[i]);
  return empirical_pmf(rho);
}

double ScalingRow::xi_ratio_quantile(double prob) const {
  std::vector<double> r(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) r[i] = xi[i] / dn;
  return sample_quantile(std::move(r), prob);
}

double ScalingRow::tau_ratio_quantile(double prob) const {
  std::vector<double> r(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) r[i] = tau[i] / dn;
  return sample_quantile(std::move(r), prob);
}

std::vector<ScalingRow> tau_scaling_experiment(const ModelParams& params,
                                               std::span<const Count> ns, Count reps,
                                               const ShardPlan& plan, Count t_cap) {
  struct Partial {
    std::vector<double> xi, tau;
    Count censored = 0;
  };
  std::vector<ScalingRow> rows;
  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    const Count n = ns[idx];
    ShardPlan shard_plan = plan;
    shard_plan.base_seed = plan.base_seed + 0x9E3779B97F4A7C15ULL * (idx + 1);
    auto shards =
        run_shards<Partial>(reps, shard_plan, [&](Engine& rng, Count share, std::size_t) {
          Partial part;
          part.xi.reserve(share);
          part.tau.reserve(share);
          for (Count r = 0; r < share; ++r) {
            CoupledState state{0, n};
            Count t = 0;
            while (!state.coupled() && t < t_cap) {
              state = coupled_step(state, params, rng);
              ++t;
            }
            const Count xi = t;
            Count x = state.x;
            while (x != 0 && t < t_cap) {
              x = step_sample(x, params, rng);
              ++t;
            }
            if (!state.coupled() || x != 0) {
              ++part.censored;
              continue;
            }
            part.xi.push_back(static_cast<double>(xi));
            part.tau.push_back(static_cast<double>(t));
          }
          return part;
        });
    ScalingRow row;
    row.n = n;
    row.dn = dn_scale(n, params);
    for (Partial& part : shards) {
      row.xi.insert(row.xi.end(), part.xi.begin(), part.xi.end());
      row.tau.insert(row.tau.end(), part.tau.begin(), part.tau.end());
      row.censored += part.censored;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

MeanEstimate extinction_time_monte_carlo(Count x0, const ModelParams& params, Count samples,
                                         Count t_cap, const ShardPlan& plan) {
  struct Partial {
    double sum = 0.0, sum_sq = 0.0;
    Count censored = 0;
  };
  auto shards = run_shards<Partial>(samples, plan, [&](Engine& rng, Count share, std::size_t) {
    Partial part;
    for (Count i = 0; i < share; ++i) {
      const ExtinctionSample e = extinction_time_sample(x0, params, rng, t_cap);
      const double t = static_cast<double>(e.t);
      part.sum += t;
      part.sum_sq += t * t;
      if (e.censored) ++part.censored;
    }
    return part;
  });
  MeanEstimate out;
  out.samples = samples;
  double sum = 0.0, sum_sq = 0.0;
  for (const Partial& part : shards) {
    sum += part.sum;
    sum_sq += part.sum_sq;
    out.censored += part.censored;
  }
  const double n = static_cast<double>(std::max<Count>(samples, 1));
  out.mean = sum / n;
  out.std_error = std::sqrt(std::max(0.0, sum_sq / n - out.mean * out.mean) / n);
  return out;
}

}  // namespace bincat
