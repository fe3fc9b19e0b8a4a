#pragma once

#include <cstdint>
#include <random>

namespace rlab {

using Rng = std::mt19937_64;

// Independent generator for (seed, stream...) keys. Sweep cells derive their
// generator from their index so results do not depend on execution order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);
Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream);

double uniform(Rng& rng, double lo, double hi);
double gaussian(Rng& rng);

}  // namespace rlab
