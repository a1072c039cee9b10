#include <doctest.h>

#include <cmath>
#include <vector>

#include "bincat/errors.hpp"
#include "bincat/pmf.hpp"
#include "oracles.hpp"

using namespace bincat;

namespace {

std::vector<double> as_vec(const Pmf& p) { return {p.probs().begin(), p.probs().end()}; }

double total(const Pmf& p) { return p.mass() + p.tail_mass(); }

Pmf random_pmf(Engine& rng, std::size_t n) {
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) s += (x = uniform01(rng));
  for (double& x : v) x /= s;
  return Pmf(v);
}

}  // namespace

TEST_SUITE("pmf") {

TEST_CASE("construction validates and trims") {
  CHECK_THROWS_AS(Pmf({0.5, -0.1, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(Pmf({0.5, 0.4}), InvalidArgument);
  CHECK_THROWS_AS(Pmf({0.5, 0.5}, -0.1), InvalidArgument);
  CHECK_THROWS_AS(Pmf({std::nan(""), 1.0}), InvalidArgument);
  const Pmf p({0.25, 0.75, 0.0, 0.0});
  CHECK(p.size() == 2);
  CHECK(p.max_state() == 1);
  CHECK(p[7] == 0.0);
  CHECK(Pmf().size() == 1);
  CHECK(Pmf()[0] == 1.0);
}

TEST_CASE("delta") {
  CHECK(as_vec(delta(0)) == std::vector<double>{1.0});
  CHECK(delta(5).mean() == 5.0);
  CHECK(delta(5).tail_mass() == 0.0);
  CHECK(tv_distance(delta(0), delta(1)).value == 1.0);
}

TEST_CASE("evolve applies one kernel step") {
  const ModelParams m(0.4, 0.3);
  const Pmf one = evolve(delta(0), m);
  CHECK(one[0] == doctest::Approx(0.6));
  CHECK(one[1] == doctest::Approx(0.4));

  Engine rng = make_stream(4);
  const Pmf d = random_pmf(rng, 40);
  const ModelParams total_kill(0.35, 1.0);
  const Pmf e = evolve(d, total_kill);
  CHECK(e[0] == doctest::Approx(0.65).epsilon(1e-14));
  for (Count j = 1; j <= 40; ++j) CHECK(e[j] == doctest::Approx(0.35 * d[j - 1]).epsilon(1e-14));

  const Pmf out = evolve(d, m);
  const std::vector<double> dense = oracle::evolve_dense(as_vec(d), 0.4, 0.3, 1, 60);
  CHECK(oracle::tv(as_vec(out), dense) < 1e-13);
  CHECK(total(out) == doctest::Approx(1.0).epsilon(1e-12));
  for (double v : out.probs()) CHECK(v >= 0.0);
}

TEST_CASE("many evolve steps stay on the dense oracle and conserve mass") {
  const ModelParams m(0.45, 0.05);
  Pmf d = delta(3);
  Evolver ev(m);
  for (int t = 0; t < 150; ++t) {
    d = ev.step(d);
    REQUIRE(total(d) == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(d.tail_mass() <= 1e-12);
  }
  const std::vector<double> dense = oracle::evolve_dense({0, 0, 0, 1}, 0.45, 0.05, 150, 200);
  CHECK(oracle::tv(as_vec(d), dense) < 1e-11);
  CHECK(tv_distance(ev.run(delta(3), 150), d).value < 1e-15);
}

TEST_CASE("evolve satisfies the generating-function relation") {
  Engine rng = make_stream(8);
  for (double c : {0.05, 0.4, 1.0}) {
    const ModelParams m(0.3, c);
    const Pmf d = random_pmf(rng, 30);
    const Pmf e = evolve(d, m);
    for (double s : {0.1, 0.5, 0.9}) {
      // each individual survives a catastrophe with probability 1 - c
      const double expect = 0.3 * s * d.pgf(s) + 0.7 * d.pgf(c + (1.0 - c) * s);
      CHECK(e.pgf(s) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("binomial thinning") {
  Engine rng = make_stream(9);
  const Pmf d = random_pmf(rng, 25);
  CHECK(tv_distance(binomial_thin(d, 1.0), d).value < 1e-15);
  CHECK(tv_distance(binomial_thin(d, 0.0), delta(0)).value < 1e-15);
  const Pmf t = binomial_thin(d, 0.37);
  CHECK(oracle::tv(as_vec(t), oracle::thin(as_vec(d), 0.37)) < 1e-12);
  for (double s : {0.0, 0.3, 0.8}) {
    CHECK(t.pgf(s) == doctest::Approx(d.pgf(1.0 - 0.37 + 0.37 * s)).epsilon(1e-12));
  }
  // thinning a geometric law gives a geometric law
  const double p = 0.4, eps = 0.3;
  const double r = p * eps / (1.0 - p * (1.0 - eps));
  const Pmf g = binomial_thin(geom_minus(1.0 - p, 1e-15), eps, 1e-15);
  CHECK(tv_distance(g, geom_minus(1.0 - r, 1e-15)).value < 1e-10);
}

TEST_CASE("thinning composes multiplicatively") {
  Engine rng = make_stream(10);
  for (int rep = 0; rep < 10; ++rep) {
    const Pmf d = random_pmf(rng, 5 + rep * 7);
    const double e1 = uniform01(rng), e2 = uniform01(rng);
    const Pmf lhs = binomial_thin(binomial_thin(d, e1), e2);
    const Pmf rhs = binomial_thin(d, e1 * e2);
    CHECK(tv_distance(lhs, rhs).value < 1e-10);
  }
}

TEST_CASE("thinning a sum of thinned variables thins each term") {
  Engine rng = make_stream(11);
  for (int rep = 0; rep < 10; ++rep) {
    const int factors = 2 + rep % 3;
    const double eps = uniform01(rng);
    Pmf lhs_inner = delta(0), rhs = delta(0);
    for (int j = 0; j < factors; ++j) {
      const Pmf dj = random_pmf(rng, 3 + 4 * j);
      const double ej = uniform01(rng);
      lhs_inner = convolve(lhs_inner, binomial_thin(dj, ej));
      rhs = convolve(rhs, binomial_thin(dj, eps * ej));
    }
    CHECK(tv_distance(binomial_thin(lhs_inner, eps), rhs).value < 1e-10);
  }
}

TEST_CASE("convolution") {
  CHECK(tv_distance(convolve(delta(2), delta(5)), delta(7)).value == 0.0);
  Engine rng = make_stream(12);
  const Pmf d = random_pmf(rng, 17);
  CHECK(tv_distance(convolve(d, delta(0)), d).value < 1e-16);
  const Pmf sum = convolve(poisson(1.0), poisson(2.0));
  CHECK(oracle::tv(as_vec(sum), oracle::poisson(3.0, 60)) < 1e-10);
  const Pmf a = random_pmf(rng, 9), b = random_pmf(rng, 13);
  CHECK(oracle::tv(as_vec(convolve(a, b)), oracle::convolve(as_vec(a), as_vec(b))) < 1e-15);
  const Pmf ta = geom_minus(0.1), tb = geom_minus(0.2);
  const Pmf tc = convolve(ta, tb);
  CHECK(tc.tail_mass() <= ta.tail_mass() + tb.tail_mass() + 1e-12 + 1e-18);
  CHECK(total(tc) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("geometric laws") {
  CHECK_THROWS_AS(geom_minus(0.0), InvalidArgument);
  CHECK_THROWS_AS(geom_minus(1.2), InvalidArgument);
  CHECK(tv_distance(geom_minus(1.0), delta(0)).value == 0.0);
  const Pmf g = geom_minus(0.6);
  CHECK(g[0] == doctest::Approx(0.6));
  CHECK(g[1] == doctest::Approx(0.24));
  CHECK(g.tail_mass() < 1e-12);
  CHECK(geom_minus(0.5).mean() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(total(g) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("poisson laws") {
  CHECK_THROWS_AS(poisson(-1.0), InvalidArgument);
  CHECK(tv_distance(poisson(0.0), delta(0)).value == 0.0);
  CHECK(std::fabs(poisson(1.0)[0] - std::exp(-1.0)) < 1e-12);
  for (double beta : {0.4, 3.0, 50.0, 900.0}) {
    const Pmf p = poisson(beta);
    CHECK(p.tail_mass() < 1e-12);
    CHECK(std::fabs(p.mean() - beta) < 1e-12 * (p.size() + beta) + 1e-9);
    CHECK(total(p) == doctest::Approx(1.0).epsilon(1e-12));
    if (beta < 100) CHECK(oracle::tv(as_vec(p), oracle::poisson(beta, p.max_state())) < 1e-12);
  }
}

TEST_CASE("total variation") {
  Engine rng = make_stream(13);
  const Pmf g1 = geom_minus(0.5), g2 = geom_minus(0.6);
  CHECK(std::fabs(tv_distance(g1, g2).value -
                  oracle::tv(oracle::geom_minus(0.5, 200), oracle::geom_minus(0.6, 200))) < 1e-12);
  CHECK(tv_distance(g1, g1).value == 0.0);
  CHECK(tv_distance(g1, g2).error_bound == doctest::Approx(0.5 * (g1.tail_mass() + g2.tail_mass())));
  for (int rep = 0; rep < 20; ++rep) {
    const Pmf a = random_pmf(rng, 10), b = random_pmf(rng, 14), c = random_pmf(rng, 7);
    const double ab = tv_distance(a, b).value, ba = tv_distance(b, a).value;
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab <= tv_distance(a, c).value + tv_distance(c, b).value + 1e-15);
  }
}

TEST_CASE("truncation keeps the tail within budget") {
  const Pmf g = geom_minus(0.01, 1e-15);
  for (double budget : {1e-12, 1e-8, 1e-4}) {
    const Pmf t = g.truncated(budget);
    CHECK(t.tail_mass() <= budget);
    CHECK(t.size() <= g.size());
    CHECK(total(t) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tv_distance(t, g).value <= budget);
  }
}

TEST_CASE("empirical laws and json round trip") {
  const std::vector<Count> samples{0, 1, 1, 3};
  const Pmf e = empirical_pmf(samples);
  CHECK(as_vec(e) == std::vector<double>{0.25, 0.5, 0.0, 0.25});
  const Pmf g = geom_minus(0.3);
  const nlohmann::json j = g;
  CHECK(j.contains("probs"));
  CHECK(j.contains("tail_mass"));
  const Pmf back = j.get<Pmf>();
  CHECK(as_vec(back) == as_vec(g));
  CHECK(back.tail_mass() == g.tail_mass());
}

}
