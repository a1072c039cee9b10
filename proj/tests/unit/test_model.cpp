#include <doctest.h>

#include <cmath>
#include <vector>

#include "bincat/errors.hpp"
#include "bincat/model.hpp"
#include "oracles.hpp"

using namespace bincat;

TEST_SUITE("chain-core") {

TEST_CASE("parameters are validated and derived quantities match") {
  CHECK_THROWS_AS(ModelParams(0.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(1.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(0.4, 0.0), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(0.4, 1.5), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(std::nan(""), 0.5), InvalidArgument);
  const ModelParams m(0.4, 0.01);
  CHECK(m.alpha() == doctest::Approx(0.994));
  CHECK(m.tilted_p() == doctest::Approx(0.4 / 0.994));
  CHECK(m.mean() == doctest::Approx(66.6666666667));
  CHECK_THROWS_AS(ModelParams(0.4, 1.0).tilted(), InvalidArgument);
  CHECK(ModelParams(0.4, 0.5).tilted() == ModelParams(0.4 / 0.7, 0.5));
}

TEST_CASE("kernel entries match the binomial description") {
  for (double p : {0.1, 0.4, 0.9}) {
    for (double c : {0.01, 0.3, 1.0}) {
      const ModelParams m(p, c);
      for (Count i : {0, 1, 2, 7, 50, 200}) {
        double row = 0.0;
        for (Count j = 0; j <= i + 3; ++j) {
          const double v = transition_prob(i, j, m);
          CHECK(v == doctest::Approx(oracle::kernel(i, j, p, c)).epsilon(1e-10));
          row += v;
        }
        CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  const ModelParams m(0.4, 0.5);
  CHECK(transition_prob(0, 1, m) == doctest::Approx(0.4));
  CHECK(transition_prob(0, 0, m) == doctest::Approx(0.6));
  CHECK(transition_prob(3, 5, m) == 0.0);
  CHECK(transition_prob(2, 1, m) == doctest::Approx(0.6 * 2 * 0.25));
  CHECK(transition_prob(5, 0, ModelParams(0.4, 1.0)) == doctest::Approx(0.6));
}

TEST_CASE("drift and hit-zero probability") {
  const ModelParams m(0.4, 0.1);
  CHECK(drift(0, m) == doctest::Approx(0.4));
  CHECK(drift(10, m) == doctest::Approx(0.4 - 0.6 * 0.1 * 10));
  // drift vanishes at the stationary mean
  CHECK(std::fabs(0.4 - 0.6 * 0.1 * m.mean()) < 1e-12);
  for (Count x : {0, 1, 3, 10}) {
    CHECK(hit_zero_prob(x, m) == doctest::Approx(transition_prob(x, 0, m)));
  }
}

TEST_CASE("one-step samples follow the kernel row") {
  const ModelParams m(0.3, 0.2);
  Engine rng = make_stream(11);
  const Count x = 12;
  const int reps = 400000;
  std::vector<int> counts(x + 2, 0);
  for (int i = 0; i < reps; ++i) {
    const Count y = step_sample(x, m, rng);
    REQUIRE(y <= x + 1);
    ++counts[y];
  }
  for (Count j = 0; j <= x + 1; ++j) {
    const double prob = transition_prob(x, j, m);
    const double sd = std::sqrt(prob * (1 - prob) / reps);
    CHECK(std::fabs(counts[j] / double(reps) - prob) <= 5.0 * sd + 1e-9);
  }
  Engine r2 = make_stream(1);
  for (int i = 0; i < 1000; ++i) {
    const Count y = step_sample(9, ModelParams(0.5, 1.0), r2);
    CHECK((y == 0 || y == 10));
  }
}

TEST_CASE("trajectories are seeded and have steps + 1 states") {
  const ModelParams m(0.4, 0.01);
  const Trajectory a = simulate_trajectory(10, 1000, m, 7);
  const Trajectory b = simulate_trajectory(10, 1000, m, 7);
  const Trajectory c = simulate_trajectory(10, 1000, m, 8);
  CHECK(a.states.size() == 1001);
  CHECK(a.states.front() == 10);
  CHECK(a.states == b.states);
  CHECK(a.states != c.states);
  CHECK(a.seed == 7);
  for (std::size_t t = 1; t < a.states.size(); ++t) {
    CHECK(a.states[t] <= a.states[t - 1] + 1);
  }
}

TEST_CASE("long-run average approaches the stationary mean") {
  const ModelParams m(0.4, 0.1);
  const Trajectory tr = simulate_trajectory(0, 2000000, m, 5);
  double s = 0.0;
  for (Count x : tr.states) s += static_cast<double>(x);
  CHECK(s / tr.states.size() == doctest::Approx(m.mean()).epsilon(0.02));
}

}
