#include <doctest.h>

#include <cmath>
#include <vector>

#include "bincat/coupling.hpp"
#include "bincat/errors.hpp"
#include "bincat/stationary.hpp"
#include "oracles.hpp"

using namespace bincat;

TEST_SUITE("coupling") {

TEST_CASE("coupled steps keep the copies ordered and each copy follows the kernel") {
  const ModelParams m(0.3, 0.25);
  Engine rng = make_stream(21);
  const int reps = 300000;
  const CoupledState start{4, 3};
  std::vector<int> lower(6, 0), upper(9, 0);
  for (int i = 0; i < reps; ++i) {
    const CoupledState s = coupled_step(start, m, rng);
    REQUIRE(s.upper() >= s.x);
    REQUIRE(s.h <= start.h);
    ++lower[s.x];
    ++upper[s.upper()];
  }
  for (Count j = 0; j < lower.size(); ++j) {
    const double prob = transition_prob(4, j, m);
    CHECK(std::fabs(lower[j] / double(reps) - prob) <= 5 * std::sqrt(prob * (1 - prob) / reps) + 1e-9);
  }
  for (Count j = 0; j < upper.size(); ++j) {
    const double prob = transition_prob(7, j, m);
    CHECK(std::fabs(upper[j] / double(reps) - prob) <= 5 * std::sqrt(prob * (1 - prob) / reps) + 1e-9);
  }
  // once the gap closes it stays closed
  CoupledState s{5, 0};
  for (int t = 0; t < 100; ++t) {
    s = coupled_step(s, m, rng);
    CHECK(s.coupled());
  }
}

TEST_CASE("exact coupling tail") {
  const ModelParams m(0.4, 0.1);
  for (Count t : {0, 1, 10, 100, 500}) {
    CHECK(std::fabs(coupling_tail_exact(1, t, m) - std::pow(m.alpha(), (double)t)) < 1e-12);
  }
  CHECK(coupling_tail_exact(0, 10, m) == 0.0);
  CHECK(coupling_tail_exact(5, 0, m) == 1.0);
  // direct sum over the number of catastrophes
  const Count gap = 4, t = 30;
  double direct = 0.0;
  for (Count k = 0; k <= t; ++k) {
    direct += oracle::binom_pmf(t, k, 0.6) * (1 - std::pow(1 - std::pow(0.9, (double)k), (double)gap));
  }
  CHECK(coupling_tail_exact(gap, t, m) == doctest::Approx(direct).epsilon(1e-12));
  // monotone in t and in the gap, and below the union bound
  for (Count g : {1, 2, 5, 20}) {
    double prev = 1.0;
    for (Count s = 0; s <= 200; s += 5) {
      const double v = coupling_tail_exact(g, s, m);
      CHECK(v <= prev + 1e-15);
      CHECK(v <= coupling_tail_upper(g, s, m).clamped + 1e-15);
      CHECK(v <= coupling_tail_exact(g + 1, s, m) + 1e-15);
      prev = v;
    }
  }
  const TailBound b = coupling_tail_upper(10, 0, m);
  CHECK(b.raw == 10.0);
  CHECK(b.clamped == 1.0);
}

TEST_CASE("Monte Carlo coupling tail matches the exact formula") {
  const ModelParams m(0.4, 0.1);
  for (auto [gap, t] : {std::pair<Count, Count>{3, 5}, {5, 50}}) {
    const TailEstimate est = coupling_tail_monte_carlo(gap, t, m, 200000, ShardPlan{17, 16, 1});
    CHECK(std::fabs(est.fraction() - coupling_tail_exact(gap, t, m)) < 4 * est.std_error() + 1e-9);
  }
  const TailEstimate a = coupling_tail_monte_carlo(3, 5, m, 5000, ShardPlan{1, 8, 1});
  const TailEstimate b = coupling_tail_monte_carlo(3, 5, m, 5000, ShardPlan{1, 8, 3});
  CHECK(a.uncoupled == b.uncoupled);
}

TEST_CASE("exact distance agrees with dense evolution") {
  const ModelParams m(0.35, 0.2);
  for (Count t : {0, 1, 7, 40}) {
    std::vector<double> dx(3, 0.0), dy(9, 0.0);
    dx[2] = 1.0;
    dy[8] = 1.0;
    const double expect = oracle::tv(oracle::evolve_dense(dx, 0.35, 0.2, t, 120),
                                     oracle::evolve_dense(dy, 0.35, 0.2, t, 120));
    const TvResult r = tv_exact(2, 8, t, m);
    CHECK(std::fabs(r.value - expect) <= r.error_bound + 1e-12);
  }
}

TEST_CASE("lower bound, exact distance and upper bound are ordered") {
  for (double p : {0.1, 0.4, 0.7}) {
    for (double c : {0.05, 0.3, 0.8}) {
      const ModelParams m(p, c);
      for (auto [x, y] : {std::pair<Count, Count>{0, 1}, {0, 5}, {3, 10}}) {
        const std::vector<Count> times{0, 1, 2, 5, 10, 25, 60};
        for (const TvRow& r : tv_table(x, y, times, m)) {
          CAPTURE(p); CAPTURE(c); CAPTURE(x); CAPTURE(y); CAPTURE(r.t);
          CHECK(r.lower <= r.exact + r.exact_err + 1e-15);
          CHECK(r.exact - r.exact_err <= r.upper + 1e-15);
          CHECK(r.upper == doctest::Approx((y - x) * std::pow(m.alpha(), (double)r.t)));
        }
      }
    }
  }
  const std::vector<Count> times{0, 3};
  for (const TvRow& r : tv_table(0, 2, times, ModelParams(0.4, 1.0))) CHECK(r.lower == 0.0);
}

TEST_CASE("tv_table rows match one-off evaluations") {
  const ModelParams m(0.4, 0.1);
  const std::vector<Count> times{0, 4, 9, 30};
  const std::vector<TvRow> rows = tv_table(1, 4, times, m);
  for (const TvRow& r : rows) {
    CHECK(r.exact == doctest::Approx(tv_exact(1, 4, r.t, m).value).epsilon(1e-12));
    CHECK(r.lower == doctest::Approx(tv_lower(1, 4, r.t, m).value).epsilon(1e-12));
    CHECK(r.upper == doctest::Approx(tv_upper(1, 4, r.t, m)));
  }
}

TEST_CASE("distance to the stationary law is below its coupling bound") {
  const ModelParams m(0.4, 0.1);
  const Pmf pi = stationary_pmf(m);
  for (Count x : {0, 3, 20}) {
    Pmf d = delta(x);
    Evolver ev(m);
    for (Count t = 0; t <= 80; ++t) {
      if (t % 20 == 0) {
        const TvResult r = tv_distance(d, pi);
        CHECK(r.value - r.error_bound <= tv_upper_stationary(x, t, m, pi) + 1e-12);
      }
      d = ev.step(d);
    }
  }
}

TEST_CASE("gap decay rate is c(1-p)") {
  const ModelParams m(0.4, 0.1);
  CHECK(spectral_gap(m) == doctest::Approx(0.06));
  CHECK(spectral_gap(m) != doctest::Approx(0.4 * 0.9));
}

TEST_CASE("uncoupled pairs look like the tilted stationary law") {
  const ModelParams m(0.4, 0.1);
  const ConditionalLaw law = conditional_law_given_uncoupled(0, 2, 80, m, 400000, ShardPlan{3, 16, 1});
  CHECK(law.retained >= 100);
  const Pmf tilted = tilted_stationary_pmf(m);
  const double tv = tv_distance(law.law, tilted).value;
  // sampling noise of an empirical law with a few thousand points
  CHECK(tv < 0.05);
  const Pmf untilted = stationary_pmf(m);
  CHECK(tv < tv_distance(law.law, untilted).value);
  CHECK_THROWS_AS(conditional_law_given_uncoupled(0, 1, 400, m, 1000, ShardPlan{}), NumericalFault);
}

TEST_CASE("conditioning on no coupling moves the law toward the tilted one as t grows") {
  const ModelParams m(0.4, 0.1);
  const Pmf tilted = tilted_stationary_pmf(m);
  // at t = 200 only about a dozen of 10^6 pairs stay uncoupled, so t = 80 is the far point
  const ConditionalLaw early = conditional_law_given_uncoupled(0, 3, 20, m, 1'000'000, ShardPlan{21, 16, 1});
  const ConditionalLaw late = conditional_law_given_uncoupled(0, 3, 80, m, 1'000'000, ShardPlan{22, 16, 1});
  CHECK(tv_distance(late.law, tilted).value < tv_distance(early.law, tilted).value);
}

TEST_CASE("retained fraction for adjacent starts is alpha^t") {
  const ModelParams m(0.4, 0.1);
  for (Count t : {0, 5, 20, 40}) {
    const Count paths = 200'000;
    const ConditionalLaw law = conditional_law_given_uncoupled(4, 5, t, m, paths, ShardPlan{30 + t, 16, 1});
    const double a = std::pow(m.alpha(), (double)t);
    const double frac = (double)law.retained / (double)paths;
    const double sigma = std::sqrt(a * (1 - a) / paths);
    CAPTURE(t);
    CHECK(law.paths == paths);
    CHECK(std::fabs(frac - a) <= 3 * sigma + 1e-15);
    if (t == 0) CHECK(law.law[4] == 1.0);
  }
}

}
