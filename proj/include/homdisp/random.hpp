#pragma once

#include <cstdint>

namespace homdisp {

/// Seed of the independent substream `index` of a base seed (splitmix64
/// mixing). Substreams make results independent of evaluation order.
std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t index);

/// One Poisson draw with the given mean from a generator seeded by `seed`.
/// mean == 0 yields 0.
std::int64_t poisson_draw(double mean, std::uint64_t seed);

/// Standard normal draw from a generator seeded by `seed`.
double normal_draw(std::uint64_t seed);

/// Non-deterministic seed for runs where the user supplied none.
std::uint64_t entropy_seed();

}  // namespace homdisp
