#include "bincat/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <boost/math/distributions/binomial.hpp>

#include "bincat/errors.hpp"
#include "bincat/kernels.hpp"

namespace bincat {

CoupledState coupled_step(CoupledState state, const ModelParams& params, Engine& rng) {
  if (bernoulli(rng, params.p())) return CoupledState{state.x + 1, state.h};
  const double keep = 1.0 - params.c();
  const Count x = binomial(rng, state.x, keep);
  const Count h = binomial(rng, state.h, keep);
  return CoupledState{x, h};
}

double coupling_tail_exact(Count gap, Count t, const ModelParams& params) {
  if (gap == 0) return 0.0;
  if (t == 0) return 1.0;
  const double keep = 1.0 - params.c();
  const boost::math::binomial_distribution<double> catastrophes(
      static_cast<double>(t), 1.0 - params.p());
  const double g = static_cast<double>(gap);
  double total = 0.0;
  for (Count k = 0; k <= t; ++k) {
    const double weight = boost::math::pdf(catastrophes, static_cast<double>(k));
    if (weight == 0.0) continue;
    const double survive_one = std::pow(keep, static_cast<double>(k));
    // 1 - (1 - keep^k)^gap, accurate when keep^k is small
    const double alive = survive_one >= 1.0 ? 1.0 : -std::expm1(g * std::log1p(-survive_one));
    total += weight * alive;
  }
  return total;
}

TailBound coupling_tail_upper(Count gap, Count t, const ModelParams& params) {
  const double raw = static_cast<double>(gap) *
                     std::pow(params.alpha(), static_cast<double>(t));
  return TailBound{raw, std::min(raw, 1.0)};
}

double TailEstimate::fraction() const {
  return paths == 0 ? 0.0 : static_cast<double>(uncoupled) / static_cast<double>(paths);
}

double TailEstimate::std_error() const {
  if (paths == 0) return 0.0;
  const double f = fraction();
  return std::sqrt(f * (1.0 - f) / static_cast<double>(paths));
}

TailEstimate coupling_tail_monte_carlo(Count gap, Count t, const ModelParams& params,
                                       Count paths, const ShardPlan& plan) {
  auto shards = run_shards<Count>(paths, plan, [&](Engine& rng, Count n, std::size_t) {
    Count uncoupled = 0;
    for (Count i = 0; i < n; ++i) {
      CoupledState s{0, gap};
      for (Count step = 0; step < t && !s.coupled(); ++step) s = coupled_step(s, params, rng);
      if (!s.coupled()) ++uncoupled;
    }
    return uncoupled;
  });
  TailEstimate out{0, paths};
  for (Count u : shards) out.uncoupled += u;
  return out;
}

double tv_upper(Count x, Count y, Count t, const ModelParams& params) {
  const Count gap = x > y ? x - y : y - x;
  return static_cast<double>(gap) * std::pow(params.alpha(), static_cast<double>(t));
}

double tv_upper_stationary(Count x, Count t, const ModelParams& params, const Pmf& pi) {
  // sum_y |y - x| pi(y) = mu - x + 2 sum_{y <= x} (x - y) pi(y)
  double below = 0.0;
  for (Count y = 0; y <= x && y < pi.size(); ++y) {
    below += static_cast<double>(x - y) * pi[y];
  }
  const double xd = static_cast<double>(x);
  const double first_moment =
      params.mean() - xd + 2.0 * below + 4.0 * xd * pi.tail_mass();
  return first_moment * std::pow(params.alpha(), static_cast<double>(t));
}

TvResult tv_exact(Count x, Count y, Count t, const ModelParams& params, double budget) {
  Evolver evolver(params, budget);
  const Pmf from_x = evolver.run(Pmf::delta(x), t);
  const Pmf from_y = evolver.run(Pmf::delta(y), t);
  return tv_distance(from_x, from_y);
}

namespace {

// Uniform mixture of delta(k), k in [x, y).
Pmf uniform_block(Count x, Count y) {
  std::vector<double> probs(y, 0.0);
  const double w = 1.0 / static_cast<double>(y - x);
  for (Count k = x; k < y; ++k) probs[k] = w;
  return make_pmf_unchecked(std::move(probs), 0.0, 0.0);
}

TvLowerBound lower_from_block(const Pmf& block, Count gap, Count t,
                              const ModelParams& params) {
  const auto probs = block.probs();
  const double peak = *std::max_element(probs.begin(), probs.end());
  const double scale = static_cast<double>(gap) * std::pow(params.alpha(), static_cast<double>(t));
  return TvLowerBound{scale * peak, scale * block.tail_mass()};
}

}  // namespace

TvLowerBound tv_lower(Count x, Count y, Count t, const ModelParams& params, double budget) {
  if (x >= y) throw InvalidArgument("tv_lower requires x < y");
  Evolver tilted(params.tilted(), budget);
  // The sum over starting points is carried as one normalised mixture.
  const Pmf block = tilted.run(uniform_block(x, y), t);
  return lower_from_block(block, y - x, t, params);
}

std::vector<TvRow> tv_table(Count x, Count y, std::span<const Count> times,
                            const ModelParams& params, double budget) {
  if (!std::is_sorted(times.begin(), times.end())) {
    throw InvalidArgument("tv_table times must be sorted");
  }
  const Count lo = std::min(x, y);
  const Count hi = std::max(x, y);
  const bool with_lower = lo < hi && params.c() < 1.0;
  Evolver evolver(params, budget);
  std::optional<Evolver> tilted;
  Pmf block;
  if (with_lower) {
    tilted.emplace(params.tilted(), budget);
    block = uniform_block(lo, hi);
  }
  Pmf from_lo = Pmf::delta(lo);
  Pmf from_hi = Pmf::delta(hi);
  Count now = 0;
  std::vector<TvRow> rows;
  rows.reserve(times.size());
  for (Count t : times) {
    for (; now < t; ++now) {
      from_lo = evolver.step(from_lo);
      from_hi = evolver.step(from_hi);
      if (with_lower) block = tilted->step(block);
    }
    const TvResult exact = tv_distance(from_lo, from_hi);
    TvRow row;
    row.t = t;
    row.exact = exact.value;
    row.exact_err = exact.error_bound;
    row.upper = tv_upper(lo, hi, t, params);
    row.lower = with_lower ? lower_from_block(block, hi - lo, t, params).value : 0.0;
    rows.push_back(row);
  }
  return rows;
}

ConditionalLaw conditional_law_given_uncoupled(Count x, Count y, Count t,
                                               const ModelParams& params, Count paths,
                                               const ShardPlan& plan) {
  if (x >= y) throw InvalidArgument("conditional law requires x < y");
  if (paths == 0) throw InvalidArgument("conditional law requires at least one path");
  auto shards = run_shards<std::vector<Count>>(
      paths, plan, [&](Engine& rng, Count n, std::size_t) {
        std::vector<Count> kept;
        for (Count i = 0; i < n; ++i) {
          CoupledState s{x, y - x};
          for (Count step = 0; step < t && !s.coupled(); ++step) {
            s = coupled_step(s, params, rng);
          }
          if (!s.coupled()) kept.push_back(s.x);
        }
        return kept;
      });
  std::vector<Count> all;
  for (auto& part : shards) all.insert(all.end(), part.begin(), part.end());
  if (all.size() < 100) {
    throw NumericalFault("only " + std::to_string(all.size()) + " of " +
                         std::to_string(paths) +
                         " coupled pairs were still apart at t = " + std::to_string(t));
  }
  return ConditionalLaw{empirical_pmf(all), static_cast<Count>(all.size()), paths};
}

double spectral_gap(const ModelParams& params) { return 1.0 - params.alpha(); }

}  // namespace bincat
