#include "homdisp/random.hpp"

#include <cmath>
#include <random>

#include "homdisp/error.hpp"

namespace homdisp {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64(splitmix64(base_seed) ^ splitmix64(index ^ 0x5851f42d4c957f2dULL));
}

std::int64_t poisson_draw(double mean, std::uint64_t seed) {
  if (!(mean >= 0) || !std::isfinite(mean)) throw InvalidArgument("Poisson mean must be finite and >= 0");
  if (mean == 0) return 0;
  std::mt19937_64 engine(seed);
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(engine);
}

double normal_draw(std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine);
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace homdisp
