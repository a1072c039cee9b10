#include "bincat/random.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/random/binomial_distribution.hpp>

namespace bincat {

Engine make_stream(std::uint64_t base_seed, std::uint64_t stream_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed),
                    static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(stream_index),
                    static_cast<std::uint32_t>(stream_index >> 32)};
  return Engine(seq);
}

double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool bernoulli(Engine& rng, double prob) { return uniform01(rng) < prob; }

Count binomial(Engine& rng, Count n, double prob) {
  if (n == 0 || prob <= 0.0) return 0;
  if (prob >= 1.0) return n;
  using Dist = boost::random::binomial_distribution<std::int64_t, double>;
  Dist dist(static_cast<std::int64_t>(n), prob);
  return static_cast<Count>(dist(rng));
}

Count geom_minus(Engine& rng, double alpha) {
  if (alpha >= 1.0) return 0;
  // 1 - u lies in (0, 1], so the logarithm is finite.
  const double u = 1.0 - uniform01(rng);
  const double k = std::floor(std::log(u) / std::log1p(-alpha));
  if (k >= static_cast<double>(std::numeric_limits<Count>::max())) {
    return std::numeric_limits<Count>::max();
  }
  return static_cast<Count>(k);
}

}  // namespace bincat
