#include <doctest.h>

#include <cmath>
#include <vector>

#include "bincat/cutoff.hpp"
#include "bincat/errors.hpp"
#include "bincat/stationary.hpp"
#include "oracles.hpp"

using namespace bincat;

TEST_SUITE("cutoff") {

TEST_CASE("family invariants") {
  CHECK_THROWS_AS(CutoffFamily::sqrt_schedule(0.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(CutoffFamily::sqrt_schedule(0.4, 0.0), InvalidArgument);
  const CutoffFamily f = CutoffFamily::sqrt_schedule(0.4, 0.1);
  const ScheduleEntry e = f.at(256);
  CHECK(e.c == doctest::Approx(1.0 / 16));
  CHECK(e.p == doctest::Approx(0.4 / 16));
  CHECK(e.y == 256);
  CHECK(f.start(256) == 256);
  CHECK_THROWS_AS(f.at(1.0), InvalidArgument);  // c = 1
  const CutoffFamily off(0.4, 0.1, [](double n) { return ScheduleEntry{0.5 / std::sqrt(n), 1 / std::sqrt(n), n}; }, "off");
  CHECK_THROWS_AS(off.at(100), InvalidArgument);
}

TEST_CASE("cutoff time and window") {
  CHECK(cutoff_time(ScheduleEntry{0.5, 1.0, std::exp(1.0)}) == doctest::Approx(1.0));
  CHECK(cutoff_time(ScheduleEntry{0.01, 0.1, 100.0}) == doctest::Approx(46.0517).epsilon(1e-5));
  CHECK(window(ScheduleEntry{0.5, 1.0, std::exp(1.0)}, 0.0) == doctest::Approx(0.5));
  CHECK(window(ScheduleEntry{0.02, 0.05, 1000.0}, 0.1) == doctest::Approx(46.3).epsilon(1e-3));
  const CutoffFamily f = CutoffFamily::sqrt_schedule(0.4, 0.1);
  double prev_t = 0.0, prev_ratio = 1e9;
  for (double n : {64.0, 256.0, 1024.0, 4096.0, 65536.0, 1048576.0}) {
    const double t = cutoff_time(n, f);
    const double ratio = window(n, f) / t;
    CHECK(t > prev_t);
    CHECK(ratio < prev_ratio);
    prev_t = t;
    prev_ratio = ratio;
  }
  CHECK(prev_ratio < 0.25);
  CHECK(round_time(2.5) == 3);
  CHECK(round_time(2.4999) == 2);
  CHECK(round_time(-1.0) == 0);
}

TEST_CASE("threshold formulas agree with an independent evaluation") {
  const CutoffFamily f = CutoffFamily::sqrt_schedule(0.4, 0.1);
  for (double n : {1024.0, 4096.0, 1e6}) {
    for (double theta : {1.0, 2.0, 5.0}) {
      const CutoffThresholds th = cutoff_thresholds(n, theta, f);
      const long double c = 1.0L / std::sqrt((long double)n);
      const long double p = 0.4L * c;
      const long double ly = std::log((long double)n);
      const long double q4 = std::pow(ly, 0.25L);
      const long double lambda = (ly + theta) / c;
      const long double nu = (ly - std::log(ly) - std::log(p / c) - theta / q4) / (-std::log1p(-c));
      const long double gamma = (1 + theta / (2 * q4)) * p * nu;
      CHECK(th.lambda == doctest::Approx((double)lambda).epsilon(1e-12));
      CHECK(th.nu == doctest::Approx((double)nu).epsilon(1e-12));
      CHECK(th.gamma == doctest::Approx((double)gamma).epsilon(1e-12));
      CHECK(th.lambda >= cutoff_time(n, f));
      // y (1-c)^nu = (p/c) ln y exp(theta / (ln y)^{1/4})
      const long double lhs = n * std::pow(1 - c, (long double)th.nu);
      const long double rhs = (p / c) * ly * std::exp(theta / q4);
      CHECK(std::fabs((double)(lhs / rhs - 1)) < 1e-8);
    }
  }
  CHECK(cutoff_thresholds(1e6, 1.0, f).nu < cutoff_time(1e6, f));
  CHECK_THROWS_AS(cutoff_thresholds(1024, 0.0, f), InvalidArgument);
  CHECK_THROWS_AS(cutoff_thresholds(2, 1.0, f), InvalidArgument);  // ln y < 1
}

TEST_CASE("Chernoff bounds as displayed and dominating exact tails") {
  const ChernoffBounds b = chernoff_bounds(100, 0.5, 0.2);
  CHECK(b.upper_tail == doctest::Approx(std::exp(-1.0)));
  CHECK(b.lower_tail == doctest::Approx(std::exp(-2.0 / 3.0)));
  const ChernoffBounds tiny = chernoff_bounds(100, 0.5, 1e-9);
  CHECK(tiny.upper_tail == doctest::Approx(1.0));
  CHECK(tiny.lower_tail == doctest::Approx(1.0));
  CHECK_THROWS_AS(chernoff_bounds(10, 0.5, 1.0), InvalidArgument);
  for (Count m : {1, 5, 20, 50, 100, 150, 200}) {
    for (double q : {0.01, 0.1, 0.3, 0.5, 0.9}) {
      for (double delta : {0.05, 0.2, 0.5, 0.9}) {
        const ChernoffBounds cb = chernoff_bounds(m, q, delta);
        CHECK(oracle::binom_upper_tail(m, q, (1 + delta) * q * m) <= cb.upper_tail + 1e-15);
        CHECK(oracle::binom_lower_tail(m, q, (1 - delta) * q * m) <= cb.lower_tail + 1e-15);
      }
    }
  }
}

TEST_CASE("distance curves") {
  const CutoffFamily f = CutoffFamily::sqrt_schedule(0.4, 0.1);
  const double n = 64;
  const Pmf pi = stationary_pmf(f.params(n));
  std::vector<Count> times(200);
  for (Count t = 0; t < times.size(); ++t) times[t] = t;
  const std::vector<DistancePoint> curve = distance_curve(n, f, times);
  CHECK(curve.front().d == doctest::Approx(1.0 - pi[64]).epsilon(1e-12));
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].d <= curve[i - 1].d + curve[i].err + curve[i - 1].err + 1e-15);
    CHECK(curve[i].d >= 0.0);
    CHECK(curve[i].d <= 1.0 + curve[i].err);
  }
  const DistancePoint* below = first_at_or_below(curve, 0.5);
  REQUIRE(below != nullptr);
  CHECK(below->d <= 0.5);
  CHECK(first_at_or_below(curve, -1.0) == nullptr);
  // a sparse set of times gives the same values
  const std::vector<Count> sparse{0, 17, 150};
  const std::vector<DistancePoint> s = distance_curve(n, f, sparse);
  for (const DistancePoint& pt : s) CHECK(pt.d == doctest::Approx(curve[pt.t].d).epsilon(1e-12));
}

TEST_CASE("two-start distance falls below e^{-theta} after lambda_n") {
  const CutoffFamily f = CutoffFamily::sqrt_schedule(0.4, 0.1);
  for (double n : {64.0, 256.0, 1024.0}) {
    for (double theta : {2.0, 5.0}) {
      const CutoffThresholds th = cutoff_thresholds(n, theta, f);
      const std::vector<Count> at{round_time(th.lambda) + 1};
      const DistancePoint d = distance_curve(n, f, at, kDefaultTruncation, DistanceTarget::from_zero).front();
      CHECK(d.d <= std::exp(-theta) + d.err);
    }
  }
}

TEST_CASE("profile rows are ordered and cover the grid") {
  const CutoffFamily f = CutoffFamily::sqrt_schedule(0.4, 0.1);
  const std::vector<Count> ns{64, 256};
  const std::vector<double> grid{-1.0, 0.0, 1.0, 3.0};
  const std::vector<ProfileRow> rows = cutoff_profile(f, ns, grid);
  CHECK(rows.size() == 8);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK((rows[i - 1].n < rows[i].n || (rows[i - 1].n == rows[i].n && rows[i - 1].t <= rows[i].t)));
  }
  for (const ProfileRow& r : rows) {
    CHECK(r.t == round_time(cutoff_time(r.n, f) + r.u * window(r.n, f)));
    CHECK(r.d >= 0.0);
    CHECK(r.d <= 1.0 + r.err);
  }
  CHECK(rows[0].d > rows[3].d);
}

TEST_CASE("stationary laws approach the Poisson limit") {
  const CutoffFamily f = CutoffFamily::sqrt_schedule(0.4, 0.1);
  double prev = 1.0;
  for (double n : {16.0, 64.0, 256.0, 1024.0}) {
    const TvResult tv = poisson_limit_check(n, f);
    CHECK(tv.value + tv.error_bound < prev);
    prev = tv.value - tv.error_bound;
    const ModelParams m = f.params(n);
    CHECK(stationary_pmf(m).mean() == doctest::Approx(m.mean()).epsilon(1e-9));
  }
  CHECK(std::fabs(f.params(1e6).mean() - 0.4) < std::fabs(f.params(16).mean() - 0.4));
}

}
