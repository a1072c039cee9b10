#pragma once

#include <cstdint>
#include <vector>

#include "bincat/random.hpp"
#include "bincat/types.hpp"

namespace bincat {

/// Birth probability p in (0,1) and per-individual kill probability c in
/// (0,1] of the random walk with binomial catastrophes.
class ModelParams {
 public:
  /// Throws InvalidArgument unless 0 < birth < 1 and 0 < kill <= 1.
  ModelParams(double birth, double kill);

  double p() const noexcept { return p_; }
  double c() const noexcept { return c_; }

  /// Probability that a single gap unit survives one step: 1 - c(1-p).
  double alpha() const noexcept { return 1.0 - c_ * (1.0 - p_); }

  /// Birth probability of the tilted chain, p / alpha.
  double tilted_p() const noexcept { return p_ / alpha(); }

  /// Stationary mean p / (c(1-p)).
  double mean() const noexcept { return p_ / (c_ * (1.0 - p_)); }

  /// Parameters (tilted_p(), c). Throws InvalidArgument when c == 1, where
  /// the tilt degenerates to p = 1.
  ModelParams tilted() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  double p_;
  double c_;
};

/// Kernel entry P(X_{t+1} = j | X_t = i).
double transition_prob(Count i, Count j, const ModelParams& params);

/// One step of the chain from state x.
Count step_sample(Count x, const ModelParams& params, Engine& rng);

/// Expected one-step increment p - (1-p) c x.
double drift(Count x, const ModelParams& params);

/// P(X_{t+1} = 0 | X_t = x) = (1-p) c^x.
double hit_zero_prob(Count x, const ModelParams& params);

struct Trajectory {
  std::vector<Count> states;
  std::uint64_t seed = 0;
};

/// Runs `steps` transitions from x0 on stream 0 of `seed`.
Trajectory simulate_trajectory(Count x0, Count steps, const ModelParams& params,
                               std::uint64_t seed);

/// Same, drawing from a caller-supplied engine; the returned seed field is
/// `seed_label`.
Trajectory simulate_trajectory(Count x0, Count steps, const ModelParams& params,
                               Engine& rng, std::uint64_t seed_label);

}  // namespace bincat
