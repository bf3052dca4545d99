#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "noiselab/flow.hpp"

namespace noiselab {

// Initial datum with its declared regularity class.
struct InitialDatum {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;  // may be empty for LInf data
  enum class Regularity { LInf, C1b } regularity = Regularity::C1b;
  double sup_bound = 1.0;
  std::string name = "datum";
};

InitialDatum datum_tanh();             // u0(x) = tanh(x), d=1
InitialDatum datum_constant(int dim, double c);
InitialDatum datum_sin(double k);      // u0(x) = sin(k x), d=1
// Smooth bump of unit peak supported on |x-c| < w, d=1.
InitialDatum datum_bump(double center, double width);
// Indicator of [a,b), d=1 (an LInf datum).
InitialDatum datum_indicator(double a, double b);

// Output grid: times must be nodes of the driving time grid for stochastic solves.
struct SpaceTimeGrid {
  std::vector<double> times;
  std::vector<Vec> points;
};

SpaceTimeGrid make_grid_1d(double lo, double hi, int n_points, std::vector<double> times);

// u(t,x) = u0(preimage(t,x)); values are exact compositions, so range is preserved
// by construction (preimages are stored for verification).
struct TransportSolution {
  enum class Method { Stochastic, Deterministic } method = Method::Stochastic;
  SpaceTimeGrid grid;
  std::vector<std::vector<double>> values;     // [time][point]
  std::vector<std::vector<Vec>> preimages;     // [time][point]
  std::vector<std::vector<std::uint8_t>> fan;  // deterministic: 1 = filled with fan_fill
  double fan_fill = 0.0;
  double sigma = 0.0;
  std::shared_ptr<const WienerPath> path;      // stochastic only
  InitialDatum::Regularity datum_regularity = InitialDatum::Regularity::C1b;
  std::string datum_name;
};

// Characteristics solver: per (t,x) the backward equation runs to time 0 on the shared
// noise and the datum is composed. Escapes abort (NumericalError), not silently.
TransportSolution solve_stochastic(const InitialDatum& u0, const DriftField& field, double sigma,
                                   std::shared_ptr<const WienerPath> path, const SpaceTimeGrid& grid,
                                   const EscapeBox& escape, int workers = 1);

// sigma = 0 backward characteristics on an internal uniform time grid with the given dt.
// Where the backward characteristic lands within fan_tol of a declared degenerate point
// of b, the value is not determined by the datum; it is filled with fan_fill and masked.
TransportSolution solve_deterministic(const InitialDatum& u0, const DriftField& field,
                                      const SpaceTimeGrid& grid, double dt, double fan_fill,
                                      const EscapeBox& escape, double fan_tol = 1e-5,
                                      int workers = 1);

// Sup-gradient refinement diagnostic over solutions on nested grids (same times, d=1).
struct GradientDiagnostic {
  std::vector<double> times;
  std::vector<std::vector<double>> sup_gradient;  // [level][time], adjacent differences
  enum class Verdict { Bounded, BlowUp, Inconclusive } verdict = Verdict::Inconclusive;
  double blow_up_time = -1.0;          // earliest trigger, -1 if none
  double bounded_rel_tol = 0.20;       // finest two levels agree within this at every time
  double blow_up_growth = 1.7;         // per-refinement growth ratio triggering blow-up
};
GradientDiagnostic gradient_diagnostic(const std::vector<TransportSolution>& levels);

// Smooth compactly supported test function (bump profile), with analytic derivatives.
struct TestFunction {
  Vec center;
  double radius = 1.0;
  double operator()(const Vec& x) const;
  Vec grad(const Vec& x) const;
  double laplacian(const Vec& x) const;
};

// Residual of the weak identity in Ito form at every node of the driving grid:
//   R(t) = int u(t)q - int u0 q + int_0^t int b.grad(u) q dx ds
//          - (sigma^2/2) int_0^t int u Lap(q) dx ds - sigma sum (int u grad q) dW
// Left-point sums in time; trapezoid in space; R(0) = 0 exactly.
struct WeakResidualReport {
  std::vector<double> times;
  std::vector<double> residual;
  std::vector<double> drift_term, laplace_term, ito_term;
  double max_abs = 0.0;
};
WeakResidualReport weak_residual(const TransportSolution& u, const TestFunction& theta,
                                 const DriftField& field, double sigma, const WienerPath& path);

// Oscillatory-sequence stability: a_n = sup over tested times of
//   | int_K (v(x) - v_n(x)) f(phi_t(x)) Jphi_t(x) dx |
// computed by forward flow plus the Jacobian series (no inversion).
struct BoundedFunction {
  std::function<double(const Vec&)> fn;
  double sup_bound = 0.0;  // declared; refused if not positive
};
struct WeakStarReport {
  std::vector<double> a;          // per sequence entry
  std::vector<double> direct_bound;  // sup|v - v_n| . ||f(phi)J||_L1(K)
  double boundary_leak = 0.0;     // max |f(phi_t(edge))| over tested times
  bool bounds_hold = true;
};
WeakStarReport stability_weakstar(const std::vector<BoundedFunction>& v_seq,
                                  const BoundedFunction& v_limit, const DriftField& field,
                                  double sigma, std::shared_ptr<const WienerPath> path,
                                  const TestFunction& f, const Box& K, int quad_cells,
                                  const std::vector<int>& time_indices, int workers = 1);

// Energy balance of a deterministic solution on a box window:
//   res(t) = int_box u(t)^2 - int_box u0^2 - int_0^t int_box u^2 div b
struct EnergyReport {
  Box window;
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> residual;
};
EnergyReport energy_identity_check(const TransportSolution& u, const DriftField& field);

// max over starts and tested times of |u0(phi_t^{-1}(phi_t(x))) - u0(x)|: the transport
// relation u(t, phi_t(x)) = u0(x) probed by round trips on one noise realization.
double transport_relation_error(const InitialDatum& u0, const DriftField& field, double sigma,
                                std::shared_ptr<const WienerPath> path,
                                const std::vector<Vec>& starts, const std::vector<int>& time_indices,
                                const EscapeBox& escape);

// Deterministic coalescence probe: forward characteristics from +-x0, first grid time
// with |X+ - X-| < tol (-1 if they never meet).
double coalescence_meet_time(const DriftField& field, double x0, const TimeGrid& grid, double tol);

// Max over nodes of |X(t_k) - X(t_0) - int b(s, X(s)) ds| (trapezoid), for candidate
// solutions of the sigma = 0 integral equation.
double ode_integral_residual(const DriftField& field, const std::function<Vec(double)>& X,
                             const TimeGrid& grid);

}  // namespace noiselab
