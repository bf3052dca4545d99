#include "noiselab/rng.hpp"

#include <cmath>

namespace noiselab {

double counter_gaussian(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                        std::uint32_t coord) {
  const double u1 = counter_uniform(seed, path, step, coord, 0);
  const double u2 = counter_uniform(seed, path, step, coord, 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace noiselab
