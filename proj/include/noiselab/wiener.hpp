#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "noiselab/vec.hpp"

namespace noiselab {

// Strictly increasing time grid t_0 < ... < t_N.
struct TimeGrid {
  std::vector<double> t;

  static TimeGrid uniform(double t0, double t1, int steps);
  explicit TimeGrid(std::vector<double> times = {});

  int steps() const { return static_cast<int>(t.size()) - 1; }
  int nodes() const { return static_cast<int>(t.size()); }
  double dt(int k) const { return t[k + 1] - t[k]; }
  double t0() const { return t.front(); }
  double t1() const { return t.back(); }
  // Index of a node equal to `time` (within tol); throws if `time` is off the grid.
  int index_of(double time, double tol = 1e-9) const;
};

// One Wiener path on a time grid. Every increment is a pure function of
// (master seed, path index, step, coordinate): regeneration is bit-identical and
// increments can be produced in any order or thread.
class WienerPath {
 public:
  WienerPath(std::uint64_t master_seed, std::uint64_t path_index, TimeGrid grid, int dim);

  // All-zero increments (deterministic transport uses sigma = 0 paths).
  static WienerPath zero(TimeGrid grid, int dim);

  const TimeGrid& grid() const { return grid_; }
  int dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

  // W(t_{k+1}) - W(t_k)
  const Vec& increment(int k) const { return incr_[k]; }
  // W(t_k), with W(t_0) = 0
  const Vec& value(int k) const { return cum_[k]; }
  // W(t_k) - W(t_j)
  Vec increment_between(int j, int k) const { return cum_[k] - cum_[j]; }

  // Same underlying path viewed on every `factor`-th node (increments summed).
  // Refinement studies compare schemes on one Brownian realization this way.
  WienerPath coarsened(int factor) const;

 private:
  WienerPath() = default;
  std::uint64_t seed_ = 0, index_ = 0;
  TimeGrid grid_;
  int dim_ = 0;
  std::vector<Vec> incr_;
  std::vector<Vec> cum_;
};

// Moment statistics over a batch of paths (used by the sampling oracles).
struct WienerMoments {
  Vec mean;            // of W(t_N)/sqrt(t_N - t_0)
  Vec variance;        // idem, per coordinate
  double cross_corr;   // coordinates 0,1 (d >= 2), else 0
  int paths = 0;
};
WienerMoments wiener_terminal_moments(std::uint64_t seed, int n_paths, const TimeGrid& grid, int dim);

}  // namespace noiselab
