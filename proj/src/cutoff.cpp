#include "bincat/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "bincat/errors.hpp"
#include "bincat/stationary.hpp"

namespace bincat {

CutoffFamily::CutoffFamily(double beta, double epsilon, Schedule schedule, std::string name)
    : beta_(beta), epsilon_(epsilon), schedule_(std::move(schedule)), name_(std::move(name)) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("cutoff family needs beta > 0");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("cutoff family needs epsilon > 0");
  }
}

CutoffFamily CutoffFamily::sqrt_schedule(double beta, double epsilon) {
  return CutoffFamily(
      beta, epsilon,
      [beta](double n) {
        const double c = 1.0 / std::sqrt(n);
        return ScheduleEntry{beta * c, c, n};
      },
      "sqrt");
}

ScheduleEntry CutoffFamily::at(double n) const {
  const ScheduleEntry e = schedule_(n);
  const std::string where = " at n = " + std::to_string(n);
  if (!(e.p > 0.0 && e.p < 1.0)) throw InvalidArgument("schedule p outside (0,1)" + where);
  if (!(e.c > 0.0 && e.c < 1.0)) throw InvalidArgument("schedule c outside (0,1)" + where);
  if (!(e.y >= 1.0)) throw InvalidArgument("schedule y below 1" + where);
  if (std::fabs(e.p / e.c - beta_) > 0.1 * beta_) {
    throw InvalidArgument("schedule p/c not within 10% of beta" + where);
  }
  return e;
}

ModelParams CutoffFamily::params(double n) const {
  const ScheduleEntry e = at(n);
  return ModelParams(e.p, e.c);
}

Count CutoffFamily::start(double n) const { return round_time(at(n).y); }

Count round_time(double t) {
  if (!(t > 0.0)) return 0;
  return static_cast<Count>(std::floor(t + 0.5));
}

double cutoff_time(const ScheduleEntry& entry) { return std::log(entry.y) / entry.c; }

double cutoff_time(double n, const CutoffFamily& family) {
  return cutoff_time(family.at(n));
}

double window(const ScheduleEntry& entry, double epsilon) {
  const double ln_y = std::log(entry.y);
  return (1.0 + epsilon) * (0.5 * ln_y + std::log(ln_y) / entry.c);
}

double window(double n, const CutoffFamily& family) {
  return window(family.at(n), family.epsilon());
}

CutoffThresholds cutoff_thresholds(double n, double theta, const CutoffFamily& family) {
  if (!(theta > 0.0)) throw InvalidArgument("cutoff thresholds need theta > 0");
  const ScheduleEntry e = family.at(n);
  const double ln_y = std::log(e.y);
  if (!(ln_y > 1.0)) throw InvalidArgument("cutoff thresholds need ln y_n > 1");
  const double quarter = std::pow(ln_y, 0.25);
  CutoffThresholds out;
  out.lambda = (ln_y + theta) / e.c;
  out.nu = (ln_y - std::log(ln_y) - std::log(e.p / e.c) - theta / quarter) /
           (-std::log1p(-e.c));
  if (!(out.nu > 0.0)) {
    throw NumericalFault("nu_n <= 0 at n = " + std::to_string(n) +
                         ": n is below the asymptotic regime");
  }
  out.gamma = (1.0 + theta / (2.0 * quarter)) * e.p * out.nu;
  return out;
}

ChernoffBounds chernoff_bounds(Count m, double q, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("Chernoff delta must lie in (0,1)");
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("Chernoff q must lie in (0,1)");
  const double mean = q * static_cast<double>(m);
  return ChernoffBounds{std::exp(-delta * delta * mean / 2.0),
                        std::exp(-delta * delta * mean / 3.0)};
}

std::vector<DistancePoint> distance_curve(double n, const CutoffFamily& family,
                                          std::span<const Count> times, double budget,
                                          DistanceTarget target) {
  if (!std::is_sorted(times.begin(), times.end())) {
    throw InvalidArgument("distance_curve times must be sorted");
  }
  const ModelParams params = family.params(n);
  Evolver evolver(params, budget);
  Pmf from_y = Pmf::delta(family.start(n));
  Pmf other = target == DistanceTarget::stationary ? stationary_pmf(params, budget)
                                                   : Pmf::delta(0);
  const bool move_other = target == DistanceTarget::from_zero;
  std::vector<DistancePoint> out;
  out.reserve(times.size());
  Count now = 0;
  for (Count t : times) {
    for (; now < t; ++now) {
      from_y = evolver.step(from_y);
      if (move_other) other = evolver.step(other);
    }
    const TvResult tv = tv_distance(from_y, other);
    out.push_back(DistancePoint{t, tv.value, tv.error_bound});
  }
  return out;
}

const DistancePoint* first_at_or_below(std::span<const DistancePoint> curve, double level) {
  for (const auto& pt : curve) {
    if (pt.d <= level) return &pt;
  }
  return nullptr;
}

std::vector<ProfileRow> cutoff_profile(const CutoffFamily& family, std::span<const Count> ns,
                                       std::span<const double> scaled_grid, double budget) {
  std::vector<ProfileRow> rows;
  for (Count n : ns) {
    const double nd = static_cast<double>(n);
    const double tn = cutoff_time(nd, family);
    const double bn = window(nd, family);
    // Distinct times, each remembering the grid values that map to it.
    std::map<Count, std::vector<double>> by_time;
    for (double u : scaled_grid) by_time[round_time(tn + u * bn)].push_back(u);
    std::vector<Count> times;
    times.reserve(by_time.size());
    for (const auto& [t, us] : by_time) times.push_back(t);
    const auto curve = distance_curve(nd, family, times, budget);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      for (double u : by_time[curve[i].t]) {
        rows.push_back(ProfileRow{n, curve[i].t, u, curve[i].d, curve[i].err});
      }
    }
  }
  return rows;
}

TvResult poisson_limit_check(double n, const CutoffFamily& family, double budget) {
  const Pmf pi = stationary_pmf(family.params(n), budget);
  return tv_distance(pi, poisson(family.beta(), budget));
}

}  // namespace bincat
