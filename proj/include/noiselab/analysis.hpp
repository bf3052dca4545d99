#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "noiselab/flow.hpp"
#include "noiselab/transport.hpp"

namespace noiselab {

// Fractional seminorm [f]_{W^{theta,p}}^p over the ball B(r) by cell-centered double
// sums. Same-cell pairs are excluded; when a Lipschitz constant is declared (d=1) the
// excluded near-diagonal mass is restored by the analytic estimate
//   sum over cells of  Lip^p . 2 h^{p(1-theta)} / (q(q+1)),  q = p(1-theta),
// which is exact for affine f. A refinement ladder flags divergence: values that keep
// increasing with increment ratio >= divergence_ratio indicate a non-integrable kernel.
struct SobolevParams {
  double theta = 0.5;
  double p = 1.0;
  int base_cells = 16;           // coarsest level, cells per axis (use even counts)
  int levels = 3;
  double refine = 2.0;           // per-axis refinement factor between levels
  double lipschitz = -1.0;       // declared Lipschitz constant; < 0 disables correction
  double divergence_ratio = 0.85;
};

struct SobolevLevel {
  int cells = 0;
  double h = 0.0;
  double value_p = 0.0;  // seminorm^p estimate at this level
};

struct SobolevReport {
  double theta = 0.0, p = 0.0, radius = 0.0;
  std::vector<SobolevLevel> levels;
  double value_p = 0.0;   // finest level
  double seminorm = 0.0;  // value_p^(1/p)
  bool divergent = false;
  std::string diagonal_note;
};

SobolevReport fractional_sobolev_seminorm(const std::function<double(const Vec&)>& f, int dim,
                                          double r, const SobolevParams& prm);
SobolevReport fractional_sobolev_seminorm_vec(const std::function<Vec(const Vec&)>& f, int dim,
                                              double r, const SobolevParams& prm);

// Seminorm^p from fixed samples on a cell grid (diagonal handling as above, no
// correction term); building block for ladder studies over precomputed data.
double sobolev_sum_from_samples(const std::vector<Vec>& points, const std::vector<double>& values,
                                double cell_weight, double cell_h, int dim, double theta, double p);

// Pointwise mollifier commutator
//   R_eps[g,v](x) = int g(y) (v(x)-v(y)) . grad theta_eps(x-y) dy
//                   + (theta_eps * (g div v))(x),
// the form whose pairings vanish as eps -> 0 for smooth data (for smooth g, v the
// first term alone tends to -g div v).
double commutator(const std::function<double(const Vec&)>& g, const DriftField& v, double t,
                  const MollifierKernel& kernel, const Vec& x);

// A test density with an explicit quadrature window containing its support.
struct TestDensity {
  std::function<double(const Vec&)> fn;
  Box window;
};
TestDensity density_of(const TestFunction& rho);

// P(eps) = int R_eps[g,v] rho dx, evaluated through the symmetrized double integral
//   D = iint g(x') grad theta_eps(x-x') . (v(x)-v(x')) (rho(x)-rho(x')) dx' dx
// plus the divergence corrections  - int g rho (theta_eps*div v) + int rho (theta_eps*(g div v)).
double commutator_pairing(const std::function<double(const Vec&)>& g, const DriftField& v,
                          double t, const TestDensity& rho, double eps, int outer_cells);

// Right-hand-side factors of the pairing bounds:
//  (i)  C ||g||_{inf,r+1} ( ||rho||_{inf,r} ||div v||_{L1,r+1} + [rho]_{C^{1-theta},r} [v]_{W^{theta,1},r+1} )
//  (ii) C ||g||_{inf,r+1} ( ||rho||_{inf,r} ||div v||_{L1,r+1} + [v]_{C^alpha,r+1} [rho]_{W^{1-alpha,1},r} )
struct CommutatorFactors {
  double g_sup = 0.0;
  double rho_sup = 0.0;
  double div_l1 = 0.0;
  double rho_holder = 0.0;   // [rho]_{C^{1-theta}} on B(r)
  double v_sobolev = 0.0;    // [v]_{W^{theta,1}} on B(r+1)
  double v_holder = 0.0;     // [v]_{C^alpha} on B(r+1)
  double rho_sobolev = 0.0;  // [rho]_{W^{1-alpha,1}} on B(r)
  double rhs_i() const { return g_sup * (rho_sup * div_l1 + rho_holder * v_sobolev); }
  double rhs_ii() const { return g_sup * (rho_sup * div_l1 + v_holder * rho_sobolev); }
};

struct CommutatorReport {
  std::vector<double> eps;
  std::vector<double> pairing;   // P(eps)
  std::vector<double> fitted_c;  // |P(eps)| / rhs_i
  CommutatorFactors factors;
  double theta = 0.5, alpha = 0.5, r = 1.0;
  bool all_finite = true;
  bool fit_stable = false;  // every fitted_c <= stability_factor * fitted_c(coarsest)
  double stability_factor = 2.0;
};

struct PairingConfig {
  double t = 0.0;  // evaluation time for the (possibly time-dependent) field
  double theta = 0.5;
  double alpha = 0.5;
  std::vector<double> eps_ladder = {0.2, 0.1, 0.05, 0.025};
  int outer_cells = 96;   // pairing quadrature, per axis
  int factor_cells = 64;  // norm quadratures, per axis (keep even: avoids div singularities)
  double stability_factor = 2.0;
};

CommutatorReport commutator_ladder(const std::function<double(const Vec&)>& g,
                                   const DriftField& v, const TestFunction& rho,
                                   const PairingConfig& cfg);

// Change of variables for flow-composed pairings; inverse and the inverse-Jacobian
// determinant must be supplied (or sampled from a d=1 flow snapshot at frozen noise).
struct Diffeomorphism {
  int dim = 1;
  std::function<Vec(const Vec&)> forward;
  std::function<Vec(const Vec&)> inverse;
  std::function<double(const Vec&)> jac_inverse_det;  // det D(phi^{-1})(y)

  static Diffeomorphism identity(int dim);
  static Diffeomorphism translation(const Vec& shift);
  // Monotone piecewise-linear snapshot of a d=1 flow at grid node t_index (one fixed
  // noise realization); the inverse Jacobian is the piecewise slope.
  static Diffeomorphism from_flow_1d(const FlowEnsemble& ens, int t_index);
};

// int R_eps[g,v](phi(x)) rho(x) dx = pairing of R_eps against
// rho_phi(y) = rho(phi^{-1}(y)) J phi^{-1}(y) over the window B(R); the support
// containment supp(rho o phi^{-1}) in B(R) is verified on the window boundary.
double commutator_with_flow(const std::function<double(const Vec&)>& g, const DriftField& v,
                            double t, const Diffeomorphism& phi, const TestFunction& rho,
                            double R, double eps, int outer_cells);

// Time-integrated Jacobian seminorm trace  int_0^T [J phi^eps_t]^p_{W^{1-alpha,p}(B(r))} dt
// on one noise realization, per mollification level. Start points are ball cell centers;
// J comes from the divergence ODE along each trajectory.
struct JacobianProbeReport {
  std::vector<double> eps;
  std::vector<double> trace;
  double alpha = 0.5, p = 1.5, r = 1.0;
  bool p_in_window = false;  // p > 2d/(d+2 alpha)
  bool bounded = false;      // trace not monotonically growing beyond 2x over the ladder
  std::string note;
};

JacobianProbeReport jacobian_sobolev_probe(const DriftField& base, double sigma, double alpha,
                                           double p, double r, const std::vector<double>& eps_ladder,
                                           std::shared_ptr<const WienerPath> path, int start_cells,
                                           int time_stride, int workers = 1);

}  // namespace noiselab
