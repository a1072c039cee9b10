#include "bincat/model.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/binomial.hpp>

#include "bincat/errors.hpp"

namespace bincat {

ModelParams::ModelParams(double birth, double kill) : p_(birth), c_(kill) {
  if (!(birth > 0.0 && birth < 1.0)) {
    throw InvalidArgument("birth probability p must lie in (0,1), got " +
                          std::to_string(birth));
  }
  if (!(kill > 0.0 && kill <= 1.0)) {
    throw InvalidArgument("kill probability c must lie in (0,1], got " +
                          std::to_string(kill));
  }
}

ModelParams ModelParams::tilted() const {
  if (c_ >= 1.0) {
    throw InvalidArgument("tilted chain is improper for c = 1 (tilted p = 1)");
  }
  return ModelParams(tilted_p(), c_);
}

double transition_prob(Count i, Count j, const ModelParams& params) {
  const double p = params.p();
  const double c = params.c();
  if (j == i + 1) return p;
  if (j > i) return 0.0;
  if (c >= 1.0) return j == 0 ? 1.0 - p : 0.0;
  const boost::math::binomial_distribution<double> survivors(
      static_cast<double>(i), 1.0 - c);
  return (1.0 - p) * boost::math::pdf(survivors, static_cast<double>(j));
}

Count step_sample(Count x, const ModelParams& params, Engine& rng) {
  if (bernoulli(rng, params.p())) return x + 1;
  return binomial(rng, x, 1.0 - params.c());
}

double drift(Count x, const ModelParams& params) {
  return params.p() - (1.0 - params.p()) * params.c() * static_cast<double>(x);
}

double hit_zero_prob(Count x, const ModelParams& params) {
  return (1.0 - params.p()) * std::pow(params.c(), static_cast<double>(x));
}

Trajectory simulate_trajectory(Count x0, Count steps, const ModelParams& params,
                               std::uint64_t seed) {
  Engine rng = make_stream(seed, 0);
  return simulate_trajectory(x0, steps, params, rng, seed);
}

Trajectory simulate_trajectory(Count x0, Count steps, const ModelParams& params,
                               Engine& rng, std::uint64_t seed_label) {
  Trajectory traj;
  traj.seed = seed_label;
  traj.states.reserve(steps + 1);
  traj.states.push_back(x0);
  Count x = x0;
  for (Count t = 0; t < steps; ++t) {
    x = step_sample(x, params, rng);
    traj.states.push_back(x);
  }
  return traj;
}

}  // namespace bincat
