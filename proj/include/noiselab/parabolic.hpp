#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "noiselab/fields.hpp"
#include "noiselab/wiener.hpp"

namespace noiselab {

// Backward parabolic solution on a truncated box: uniform nodes (nx cells per axis,
// nx+1 nodes), uniform time slices t_m = m T / nt, one scalar grid per component.
// Terminal slice U(T, .) = 0 is stored exactly. Homogeneous Neumann walls via mirror
// ghosts. values[c][m][node] with nodes flattened x-fastest.
struct ParabolicSolution {
  Box box;
  int dim = 1, components = 1, nx = 0, nt = 0;
  double T = 0.0, lambda = 0.0, sigma = 1.0;
  std::string boundary = "neumann";
  std::vector<std::vector<std::vector<double>>> values;
  std::vector<double> xs;  // shared per-axis nodes (isotropic box)

  int nodes_per_axis() const { return nx + 1; }
  int node_count() const;
  double h() const { return box.side(0) / nx; }
  double t_at(int m) const { return T * m / nt; }
  int flat(int i, int j = 0) const { return dim == 1 ? i : j * (nx + 1) + i; }

  double value(int c, int m, int i, int j = 0) const { return values[c][m][flat(i, j)]; }
  // Multilinear space interpolation at time slice m (x clamped to the box).
  double interp(int c, int m, const Vec& x) const;
  // Gradient of component c by central differences on the grid, interpolated at x.
  Vec grad_interp(int c, int m, const Vec& x) const;
  // All components at (t, x), linear in t between slices.
  Vec U_at(double t, const Vec& x) const;
  // G(c, i) = dU_c/dx_i at (t, x).
  Mat gradU_at(double t, const Vec& x) const;

  double sup_norm() const;       // max |values|
  double sup_grad_norm() const;  // grid sup of the spectral norm of the gradient matrix
};

// Marches  dV/dtau = b.grad V + (sigma^2/2) Lap V + source - lambda V  from V(0) = 0
// (tau = T - t): drift and source explicit, diffusion and lambda implicit (Thomas
// solves; d=2 by directional splitting). Refuses when dtau sup|b| / dx > 1.
ParabolicSolution solve_backward_U(const DriftField& b, double lambda, double sigma,
                                   const Box& box, int nx, double T, int nt);

// Scalar problem  dF/dt + b_eps.grad F + (1/2) Lap F = div b_eps, F(T) = 0 (sigma = 1).
ParabolicSolution solve_F_eps(const DriftField& b_eps, const Box& box, int nx, double T, int nt);

// (int |F|^p + |grad F|^p dx)^(1/p) over the box per stored time slice (component 0).
std::vector<double> w1p_norm_per_time(const ParabolicSolution& sol, double p);

struct GradientBoundReport {
  double sup_grad = 0.0;
  double bound = 0.5;
  bool pass = false;
};
GradientBoundReport gradient_bound_check(const ParabolicSolution& sol);

struct LambdaScanReport {
  std::vector<double> lambdas;
  std::vector<double> sup_grad;
  double threshold = -1.0;  // first lambda in the scan meeting the bound, -1 if none
  bool monotone = true;     // sup|grad U| non-increasing along the scan within 5%
};
LambdaScanReport lambda_scan(const DriftField& b, double sigma, const Box& box, int nx, double T,
                             int nt, const std::vector<double>& lambdas, int workers = 1);

// U supplied to the transformed-identity check: exact closed forms or interpolated
// PDE solutions behind one interface.
struct UFunction {
  std::function<Vec(double, const Vec&)> value;
  std::function<Mat(double, const Vec&)> grad;  // (c,i) = dU_c/dx_i
  Box valid_box;  // paths leaving it are dropped and counted
};
UFunction u_zero(int dim, const Box& valid);
// Spatially constant solution for b == c: U(t) = c (T-t) for lambda = 0, else
// (c/lambda)(1 - e^{-lambda (T-t)}); grad U = 0.
UFunction u_constant_field(const Vec& c, double lambda, double T, const Box& valid);
UFunction u_from_solution(std::shared_ptr<const ParabolicSolution> sol, double margin_cells = 1.5);

// Residual of  X(t) = x0 + U(0,x0) - U(t,X(t)) + int lambda U ds + sigma int gradU dW
//              + sigma W(t)
// along Euler paths of dX = b dt + sigma dW (left-point sums, same noise).
struct ZvonkinConfig {
  int n_paths = 200;
  std::uint64_t seed = 7;
  TimeGrid grid{{0.0, 1.0}};
  Vec x0;
  int workers = 1;
};
struct ZvonkinReport {
  std::vector<double> per_path;  // max-over-nodes residual, kept paths
  int paths_total = 0;
  int paths_dropped = 0;  // left the U validity box
  double max_residual = 0.0;
  double mean_residual = 0.0;
};
ZvonkinReport zvonkin_residual(const DriftField& b, double lambda, double sigma,
                               const UFunction& U, const ZvonkinConfig& cfg);

}  // namespace noiselab
