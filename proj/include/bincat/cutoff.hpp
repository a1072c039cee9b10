#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bincat/model.hpp"
#include "bincat/pmf.hpp"

namespace bincat {

/// Parameters of the n-th member of a cutoff family.
struct ScheduleEntry {
  double p = 0.0;
  double c = 0.0;
  double y = 0.0;  // starting state (real-valued in general)
};

/// A sequence (p_n, c_n, y_n) with p_n / c_n -> beta, plus the window
/// parameter epsilon.
class CutoffFamily {
 public:
  using Schedule = std::function<ScheduleEntry(double n)>;

  /// Throws InvalidArgument unless beta > 0 and epsilon > 0.
  CutoffFamily(double beta, double epsilon, Schedule schedule, std::string name);

  /// c_n = n^{-1/2}, p_n = beta n^{-1/2}, y_n = n.
  static CutoffFamily sqrt_schedule(double beta, double epsilon);

  double beta() const noexcept { return beta_; }
  double epsilon() const noexcept { return epsilon_; }
  const std::string& name() const noexcept { return name_; }

  /// Entry n, checked: p, c in (0,1), y >= 1, and p/c within 10% of beta.
  ScheduleEntry at(double n) const;

  ModelParams params(double n) const;

  /// Integer starting state: y_n rounded half-up.
  Count start(double n) const;

 private:
  double beta_;
  double epsilon_;
  Schedule schedule_;
  std::string name_;
};

/// Real times are mapped to steps by rounding half-up, clamped at 0.
Count round_time(double t);

/// t_n = ln y_n / c_n.
double cutoff_time(double n, const CutoffFamily& family);
double cutoff_time(const ScheduleEntry& entry);

/// b_n = (1 + epsilon) (ln y_n / 2 + ln ln y_n / c_n).
double window(double n, const CutoffFamily& family);
double window(const ScheduleEntry& entry, double epsilon);

struct CutoffThresholds {
  double lambda = 0.0;
  double nu = 0.0;
  double gamma = 0.0;
};

/// lambda_n = (ln y + theta)/c,
/// nu_n = (ln y - ln ln y - ln(p/c) - theta / (ln y)^{1/4}) / (-ln(1-c)),
/// gamma_n = (1 + theta / (2 (ln y)^{1/4})) p nu_n.
/// Throws InvalidArgument for theta <= 0 or ln y <= 1, NumericalFault when
/// nu_n <= 0.
CutoffThresholds cutoff_thresholds(double n, double theta, const CutoffFamily& family);

struct ChernoffBounds {
  double upper_tail = 0.0;  // bound on P(X > (1+delta) q m)
  double lower_tail = 0.0;  // bound on P(X < (1-delta) q m)
};

/// exp(-delta^2 q m / 2) and exp(-delta^2 q m / 3) for X ~ Bin(m, q).
/// Throws InvalidArgument unless 0 < delta < 1 and 0 < q < 1.
ChernoffBounds chernoff_bounds(Count m, double q, double delta);

enum class DistanceTarget {
  stationary,  // d_t(y_n, pi_n)
  from_zero,   // d_t(0, y_n)
};

struct DistancePoint {
  Count t = 0;
  double d = 0.0;
  double err = 0.0;
};

/// Exact distance from delta(y_n) after t steps to the target, for each of
/// the sorted `times`; one incremental evolution covers all of them.
std::vector<DistancePoint> distance_curve(double n, const CutoffFamily& family,
                                          std::span<const Count> times,
                                          double budget = kDefaultTruncation,
                                          DistanceTarget target = DistanceTarget::stationary);

/// First point of a curve with d <= level, or nullptr.
const DistancePoint* first_at_or_below(std::span<const DistancePoint> curve, double level);

struct ProfileRow {
  Count n = 0;
  Count t = 0;
  double u = 0.0;
  double d = 0.0;
  double err = 0.0;
};

/// Distance to stationarity at t = round(t_n + u b_n) for every n and every
/// u of the scaled grid. Rows are ordered by (n, t).
std::vector<ProfileRow> cutoff_profile(const CutoffFamily& family, std::span<const Count> ns,
                                       std::span<const double> scaled_grid,
                                       double budget = kDefaultTruncation);

/// TV between pi_n and Poisson(beta).
TvResult poisson_limit_check(double n, const CutoffFamily& family,
                             double budget = kDefaultTruncation);

}  // namespace bincat
