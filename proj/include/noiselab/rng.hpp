#pragma once

#include <cstdint>

namespace noiselab {

// splitmix64 finalizer: the avalanche stage used as the mixing primitive.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Counter-addressed uniform in (0,1]: a pure function of its inputs.
// Chained mixing keeps distinct (seed, path, step, coord, stream) tuples decorrelated.
inline double counter_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                              std::uint32_t coord, std::uint32_t stream) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ path);
  h = mix64(h ^ step);
  h = mix64(h ^ (static_cast<std::uint64_t>(coord) << 32 | stream));
  return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;  // in (0, 1]
}

// Standard normal addressed by (seed, path index, step, coordinate); Box-Muller on two
// counter uniforms. Bit-identical on regeneration, safe to evaluate from any thread.
double counter_gaussian(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                        std::uint32_t coord);

}  // namespace noiselab
