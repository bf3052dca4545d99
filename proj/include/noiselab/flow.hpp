#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "noiselab/fields.hpp"
#include "noiselab/wiener.hpp"

namespace noiselab {

// Escape bound for trajectories; exceeding it flags the sample instead of running on.
struct EscapeBox {
  Box box;
  static EscapeBox standard(int dim) { return {Box::cube(dim, 10.0)}; }
};

// One trajectory on (a suffix or prefix of) the path's time grid.
// forward: states[i] = X(t_{start_index + i}), i = 0..N-start_index
// backward: states[i] = Z(t_i), i = 0..start_index, anchored Z(t_start_index) = start.
struct FlowSample {
  bool forward = true;
  int anchor_index = 0;  // grid index of the anchor time (s forward, t backward)
  Vec start;
  std::vector<Vec> states;
  bool escaped = false;
  int escape_node = -1;  // grid index where the escape bound was first exceeded
  std::shared_ptr<const WienerPath> path;

  // State at absolute grid index k (forward: k >= anchor, backward: k <= anchor).
  const Vec& at_index(int k) const;
};

// Explicit Euler-Maruyama from grid node s_index: X_{k+1} = X_k + b(t_k,X_k) dt + sigma dW_k.
FlowSample integrate_forward(const DriftField& field, double sigma, int s_index, const Vec& x,
                             std::shared_ptr<const WienerPath> path, const EscapeBox& escape);

// Backward transport: Z_k = Z_{k+1} - b(t_{k+1}, Z_{k+1}) dt_k - sigma dW_k, anchored at
// Z(t_index) = x. Realizes the inverse flow along the same noise.
FlowSample integrate_backward(const DriftField& field, double sigma, int t_index, const Vec& x,
                              std::shared_ptr<const WienerPath> path, const EscapeBox& escape);

// A family of forward trajectories from a start grid, one shared Wiener path.
class FlowEnsemble {
 public:
  FlowEnsemble(DriftField field, double sigma, std::shared_ptr<const WienerPath> path,
               std::vector<Vec> starts, EscapeBox escape);

  const DriftField& field() const { return field_; }
  double sigma() const { return sigma_; }
  const std::shared_ptr<const WienerPath>& path() const { return path_; }
  const std::vector<Vec>& starts() const { return starts_; }
  const FlowSample& sample(int i) const { return samples_[i]; }
  int size() const { return static_cast<int>(samples_.size()); }
  const EscapeBox& escape() const { return escape_; }
  bool any_escaped() const;

  // Exact flow-map evaluation: stored sample if x is a start point, otherwise a fresh
  // integration on the same noise.
  Vec flow_at(int t_index, const Vec& x) const;

  // Pairs of trajectories closer than tol at some node (injectivity proxy).
  int injectivity_violations(double tol) const;
  // d=1: start order preserved by the flow at every node.
  bool order_preserved() const;

 private:
  DriftField field_;
  double sigma_;
  std::shared_ptr<const WienerPath> path_;
  std::vector<Vec> starts_;
  EscapeBox escape_;
  std::vector<FlowSample> samples_;
};

struct InverseResult {
  Vec point;                 // phi_t^{-1}(x) realized by the backward equation
  bool extrapolated = false; // x outside the hull of the ensemble image at time t
  bool escaped = false;
};

// Inverse flow at (t_index, x) on the ensemble's noise; hull membership of x in the
// time-t image is checked per axis (d=1: exact interval).
InverseResult invert_flow(const FlowEnsemble& ens, int t_index, const Vec& x);

// d=1 cross-check: piecewise-linear inversion of the sampled monotone map x -> phi_t(x).
double invert_flow_interpolated(const FlowEnsemble& ens, int t_index, double x);

struct JacobianFd {
  Mat d_phi;
  double det = 0.0;
  bool near_singular = false;  // |det| < 1e-12
};

// Central-difference flow Jacobian at (t_index, x); offsets integrate on the same noise.
// Requires x +- h e_i inside the ensemble hull (pad h) unless the ensemble is unbounded.
JacobianFd jacobian_fd(const FlowEnsemble& ens, int t_index, const Vec& x, double h);

// J(t_k) = exp( int_0^{t_k} div b(s, X_s) ds ) along the forward trajectory from x
// (trapezoid in time); positive by construction. Needs analytic or FD divergence
// finite along the trajectory.
std::vector<double> jacobian_ode(const DriftField& field, double sigma, const Vec& x,
                                 std::shared_ptr<const WienerPath> path, const EscapeBox& escape);

// Variational Jacobian matrix series along a trajectory: D_{k+1} = (I + Db dt) D_k.
// Requires field.jac.
std::vector<Mat> jacobian_variational(const DriftField& field, double sigma, const Vec& x,
                                      std::shared_ptr<const WienerPath> path,
                                      const EscapeBox& escape);

// max over starts of |phi_{s,t}(phi_{0,s}(x)) - phi_{0,t}(x)| on one shared path.
double flow_composition_check(const DriftField& field, double sigma,
                              std::shared_ptr<const WienerPath> path, int s_index, int t_index,
                              const std::vector<Vec>& starts, const EscapeBox& escape);

// Mollification-stability experiment: fields b_n = mollify(b, eps_n) against the
// finest-eps reference, common noise across n, p-th moment displacement statistic
//   D_n = max over starts of mean over paths of sup_t |phi^n_t - phi^ref_t|^p
// and the Jacobian moment  M_n = max over starts of mean over paths of sup_t |Dphi^n_t|^p.
struct StabilityConfig {
  std::vector<double> eps_ladder;  // entries <= 0 mean "use the base field unmollified"
  double sigma = 1.0;
  double p = 2.0;
  int n_paths = 1000;              // refused below 100
  std::uint64_t seed = 0;
  TimeGrid grid{{0.0, 1.0}};
  std::vector<Vec> starts;
  int workers = 1;
};

struct StabilityReport {
  std::vector<double> eps;
  std::vector<double> displacement;     // D_n (grid max is a lower bound of the sup)
  std::vector<double> displacement_se;  // Monte Carlo standard error at the argmax start
  std::vector<double> jacobian_moment;  // M_n; empty if the fields carry no Jacobian
  bool decreasing = false;              // D_n strictly decreasing along the ladder
  int paths = 0;
};

StabilityReport stability_experiment(const DriftField& base, const StabilityConfig& cfg);

}  // namespace noiselab
