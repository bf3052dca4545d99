#include "noiselab/wiener.hpp"

#include <cmath>

#include "noiselab/errors.hpp"
#include "noiselab/rng.hpp"

namespace noiselab {

TimeGrid::TimeGrid(std::vector<double> times) : t(std::move(times)) {
  for (std::size_t k = 0; k + 1 < t.size(); ++k)
    if (!(t[k] < t[k + 1])) throw ValidationError("TimeGrid: nodes must be strictly increasing");
}

TimeGrid TimeGrid::uniform(double t0, double t1, int steps) {
  if (steps < 1) throw ValidationError("TimeGrid: need at least one step");
  if (!(t1 > t0)) throw ValidationError("TimeGrid: t1 must exceed t0");
  std::vector<double> ts(steps + 1);
  const double dt = (t1 - t0) / steps;
  for (int k = 0; k <= steps; ++k) ts[k] = t0 + k * dt;
  ts.back() = t1;
  return TimeGrid(std::move(ts));
}

int TimeGrid::index_of(double time, double tol) const {
  for (std::size_t k = 0; k < t.size(); ++k)
    if (std::abs(t[k] - time) <= tol) return static_cast<int>(k);
  throw ValidationError("TimeGrid: requested time is not a grid node");
}

WienerPath::WienerPath(std::uint64_t master_seed, std::uint64_t path_index, TimeGrid grid, int dim)
    : seed_(master_seed), index_(path_index), grid_(std::move(grid)), dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError("WienerPath: bad dimension");
  const int n = grid_.steps();
  incr_.reserve(n);
  cum_.reserve(n + 1);
  cum_.push_back(Vec::zero(dim));
  for (int k = 0; k < n; ++k) {
    const double sd = std::sqrt(grid_.dt(k));
    Vec dw(dim);
    for (int c = 0; c < dim; ++c)
      dw[c] = sd * counter_gaussian(seed_, index_, static_cast<std::uint64_t>(k),
                                    static_cast<std::uint32_t>(c));
    incr_.push_back(dw);
    cum_.push_back(cum_.back() + dw);
  }
}

WienerPath WienerPath::zero(TimeGrid grid, int dim) {
  WienerPath p;
  p.grid_ = std::move(grid);
  p.dim_ = dim;
  const int n = p.grid_.steps();
  p.incr_.assign(n, Vec::zero(dim));
  p.cum_.assign(n + 1, Vec::zero(dim));
  return p;
}

WienerPath WienerPath::coarsened(int factor) const {
  if (factor < 1) throw ValidationError("WienerPath::coarsened: factor must be >= 1");
  if (grid_.steps() % factor != 0)
    throw ValidationError("WienerPath::coarsened: factor must divide the step count");
  WienerPath p;
  p.seed_ = seed_;
  p.index_ = index_;
  p.dim_ = dim_;
  std::vector<double> ts;
  for (int k = 0; k <= grid_.steps(); k += factor) ts.push_back(grid_.t[k]);
  p.grid_ = TimeGrid(std::move(ts));
  p.cum_.push_back(Vec::zero(dim_));
  for (int k = 0; k < grid_.steps(); k += factor) {
    p.incr_.push_back(increment_between(k, k + factor));
    p.cum_.push_back(cum_[k + factor]);
  }
  return p;
}

WienerMoments wiener_terminal_moments(std::uint64_t seed, int n_paths, const TimeGrid& grid, int dim) {
  if (n_paths < 2) throw ValidationError("wiener_terminal_moments: need at least two paths");
  const double span = grid.t1() - grid.t0();
  std::vector<Vec> terminal(n_paths);
  for (int m = 0; m < n_paths; ++m) {
    WienerPath p(seed, static_cast<std::uint64_t>(m), grid, dim);
    terminal[m] = (1.0 / std::sqrt(span)) * p.value(grid.steps());
  }
  WienerMoments mom;
  mom.paths = n_paths;
  mom.mean = Vec::zero(dim);
  mom.variance = Vec::zero(dim);
  for (const Vec& w : terminal) mom.mean += w;
  mom.mean *= 1.0 / n_paths;
  for (const Vec& w : terminal)
    for (int c = 0; c < dim; ++c) {
      const double d = w[c] - mom.mean[c];
      mom.variance[c] += d * d;
    }
  mom.variance *= 1.0 / (n_paths - 1);
  mom.cross_corr = 0.0;
  if (dim >= 2) {
    double cov = 0.0;
    for (const Vec& w : terminal) cov += (w[0] - mom.mean[0]) * (w[1] - mom.mean[1]);
    cov /= (n_paths - 1);
    mom.cross_corr = cov / std::sqrt(mom.variance[0] * mom.variance[1]);
  }
  return mom;
}

}  // namespace noiselab
