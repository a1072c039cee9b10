#pragma once

#include <cstdint>
#include <random>

#include "bincat/types.hpp"

namespace bincat {

/// Random source used throughout: one 64-bit Mersenne twister per stream.
using Engine = std::mt19937_64;

/// Builds the engine for stream `stream_index` of the run seeded with
/// `base_seed`. The state is expanded by std::seed_seq over the four 32-bit
/// words of (base_seed, stream_index), which is portable and gives
/// independent-looking streams for distinct indices.
Engine make_stream(std::uint64_t base_seed, std::uint64_t stream_index = 0);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double uniform01(Engine& rng);

/// Bernoulli(prob) draw.
bool bernoulli(Engine& rng, double prob);

/// Binomial(n, prob) draw. Inversion when n*min(prob, 1-prob) is small,
/// BTRD otherwise.
Count binomial(Engine& rng, Count n, double prob);

/// Geom^-(alpha) draw: number of failures before the first success of
/// probability alpha.
Count geom_minus(Engine& rng, double alpha);

}  // namespace bincat
