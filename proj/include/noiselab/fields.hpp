#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "noiselab/vec.hpp"

namespace noiselab {

// A drift field b(t,x) with its declared analytic structure. Immutable value type.
// eval must return finite components; a non-finite eval is a hard error (see operator()).
// div, by contrast, may legitimately return a non-finite marker at declared singular
// points (e.g. 1/sqrt|x| at 0); callers check std::isfinite.
struct DriftField {
  int dim = 1;
  std::function<Vec(double, const Vec&)> eval;
  std::function<double(double, const Vec&)> div;       // analytic divergence, may be empty
  std::function<Mat(double, const Vec&)> jac;          // analytic space Jacobian, may be empty
  double alpha = 1.0;                                  // declared Holder exponent in (0,1]
  std::optional<double> sup_bound;                     // nullopt = unbounded (diagnostic only)
  bool time_dependent = false;
  std::optional<Box> domain;                           // validity box if restricted
  std::vector<Vec> div_singularities;                  // declared singular points of div
  std::vector<Vec> degenerate_points;                  // zeros of b where b is non-Lipschitz
  std::string name = "field";

  // Checked evaluation: throws NumericalError on non-finite output.
  Vec operator()(double t, const Vec& x) const;
  bool has_div() const { return static_cast<bool>(div); }
  bool has_jac() const { return static_cast<bool>(jac); }
};

// sgn with sgn(0) = 0.
inline double sgn(double x) { return (x > 0) - (x < 0); }

// b(x) = sign * 2 * sgn(x) * sqrt|x| in d=1; alpha = 1/2, sup unbounded on R but
// bounded on any box. div b = sign / sqrt|x| away from 0.
DriftField make_sqrt_drift(int sign);

DriftField make_zero_drift(int dim);
DriftField make_constant_drift(const Vec& c);
// d=1, b(x) = a*x.
DriftField make_linear_drift(double a);
// d=2, b(x,y) = (-y, x): divergence-free rotation.
DriftField make_rotation_drift();
// d=2 tensor square-root field b = (2 sgn(x1) sqrt|x1|, 2 sgn(x2) sqrt|x2|);
// alpha = 1/2 and div b = 1/sqrt|x1| + 1/sqrt|x2| lies in L^p_loc for p < 2.
DriftField make_sqrt_drift_2d();
// Smooth compactly supported d=1 field b(x) = c * exp(1 - 1/(1-(x/R)^2)) on |x|<R.
DriftField make_bump_drift(double c, double radius);

// Mollifier theta_eps(x) = eps^-d theta(x/eps). The base profile is 1 on B(1), a smooth
// exponential step down to 0 on B(2)\B(1), then normalized to unit mass (the plateau
// conditions and unit mass cannot hold together in low dimension, so the profile is
// rescaled; symmetry and support are exact).
class MollifierKernel {
 public:
  MollifierKernel(int dim, double epsilon);

  int dim() const { return dim_; }
  double epsilon() const { return eps_; }
  double support_radius() const { return 2.0 * eps_; }

  double operator()(const Vec& x) const;  // theta_eps(x)
  Vec gradient(const Vec& x) const;       // grad theta_eps(x)

  // Unnormalized plateau profile s(r) and its radial derivative.
  static double profile(double r);
  static double profile_deriv(double r);

  // \int theta_eps by the same tensor Gauss-Legendre rule mollify uses; for tests.
  double mass_quadrature(int nodes_per_axis) const;

 private:
  int dim_;
  double eps_;
  double norm_;  // \int_{R^d} s(|x|) dx
};

// Nodes per axis for convolution quadrature over the kernel support.
inline constexpr int kMollifyNodes = 64;

// b_eps(t,x) = (theta_eps * b(t,.))(x) by tensor Gauss-Legendre over [-2eps,2eps]^d.
// The result carries analytic div (grad-kernel convolution) and space Jacobian.
// If the input declares a validity domain, the output domain shrinks by 2eps;
// an empty shrunken domain is a padding violation.
DriftField mollify(const DriftField& field, const MollifierKernel& kernel);

// Divergence at (t,x): analytic if declared, else central differences with step h.
// At declared singular points of an analytic div the non-finite value is returned as-is.
double divergence(const DriftField& field, double t, const Vec& x, double h = 1e-4);

// Result of a Holder seminorm scan.
struct HolderReport {
  double alpha = 0.0;
  double value = 0.0;    // sup over scanned pairs
  double t_star = 0.0;
  Vec x_star, y_star;    // attaining pair
  int points_used = 0;   // after subsampling
  int points_given = 0;
};

// sup over time grid and distinct point pairs of |f(t,x)-f(t,y)| / |x-y|^alpha.
// Exhaustive pair scan; point sets larger than max_points are subsampled by stride.
HolderReport estimate_holder_seminorm(const std::function<double(double, const Vec&)>& f,
                                      double alpha, const std::vector<Vec>& points,
                                      const std::vector<double>& times,
                                      int max_points = 20000);

// Vector-field variant: distances |b(t,x)-b(t,y)| in the Euclidean norm.
HolderReport estimate_holder_seminorm(const DriftField& field, double alpha,
                                      const std::vector<Vec>& points,
                                      const std::vector<double>& times,
                                      int max_points = 20000);

}  // namespace noiselab
