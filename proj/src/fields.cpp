#include "noiselab/fields.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "noiselab/errors.hpp"
#include "noiselab/quadrature.hpp"

namespace noiselab {

Vec DriftField::operator()(double t, const Vec& x) const {
  Vec b = eval(t, x);
  if (!b.finite()) {
    std::ostringstream os;
    os << "field '" << name << "': non-finite value at t=" << t << ", x=(";
    for (int i = 0; i < x.dim(); ++i) os << (i ? "," : "") << x[i];
    os << ")";
    throw NumericalError(os.str());
  }
  return b;
}

DriftField make_sqrt_drift(int sign) {
  if (sign != 1 && sign != -1) throw ValidationError("make_sqrt_drift: sign must be +-1");
  DriftField f;
  f.dim = 1;
  const double s = sign;
  f.eval = [s](double, const Vec& x) -> Vec { return {s * 2.0 * sgn(x[0]) * std::sqrt(std::abs(x[0]))}; };
  // div = sign / sqrt|x|; at x=0 this is the declared singularity and IEEE gives +inf.
  f.div = [s](double, const Vec& x) -> double { return s / std::sqrt(std::abs(x[0])); };
  f.alpha = 0.5;
  f.sup_bound = std::nullopt;
  f.div_singularities = {Vec{0.0}};
  f.degenerate_points = {Vec{0.0}};
  f.name = sign > 0 ? "sqrt_drift(+1)" : "sqrt_drift(-1)";
  return f;
}

DriftField make_zero_drift(int dim) {
  DriftField f;
  f.dim = dim;
  f.eval = [dim](double, const Vec&) { return Vec::zero(dim); };
  f.div = [](double, const Vec&) { return 0.0; };
  f.jac = [dim](double, const Vec&) { return Mat(dim); };
  f.alpha = 1.0;
  f.sup_bound = 0.0;
  f.name = "zero";
  return f;
}

DriftField make_constant_drift(const Vec& c) {
  DriftField f;
  f.dim = c.dim();
  f.eval = [c](double, const Vec&) { return c; };
  f.div = [](double, const Vec&) { return 0.0; };
  f.jac = [d = c.dim()](double, const Vec&) { return Mat(d); };
  f.alpha = 1.0;
  f.sup_bound = c.norm();
  f.name = "constant";
  return f;
}

DriftField make_linear_drift(double a) {
  DriftField f;
  f.dim = 1;
  f.eval = [a](double, const Vec& x) -> Vec { return {a * x[0]}; };
  f.div = [a](double, const Vec&) { return a; };
  f.jac = [a](double, const Vec&) {
    Mat m(1);
    m(0, 0) = a;
    return m;
  };
  f.alpha = 1.0;
  f.sup_bound = std::nullopt;
  f.name = "linear";
  return f;
}

DriftField make_rotation_drift() {
  DriftField f;
  f.dim = 2;
  f.eval = [](double, const Vec& x) -> Vec { return {-x[1], x[0]}; };
  f.div = [](double, const Vec&) { return 0.0; };
  f.jac = [](double, const Vec&) {
    Mat m(2);
    m(0, 1) = -1.0;
    m(1, 0) = 1.0;
    return m;
  };
  f.alpha = 1.0;
  f.sup_bound = std::nullopt;
  f.name = "rotation";
  return f;
}

DriftField make_sqrt_drift_2d() {
  DriftField f;
  f.dim = 2;
  f.eval = [](double, const Vec& x) -> Vec {
    return {2.0 * sgn(x[0]) * std::sqrt(std::abs(x[0])), 2.0 * sgn(x[1]) * std::sqrt(std::abs(x[1]))};
  };
  f.div = [](double, const Vec& x) -> double {
    return 1.0 / std::sqrt(std::abs(x[0])) + 1.0 / std::sqrt(std::abs(x[1]));
  };
  f.alpha = 0.5;
  f.sup_bound = std::nullopt;
  f.div_singularities = {Vec{0.0, 0.0}};  // singular on the coordinate axes; origin listed
  f.degenerate_points = {Vec{0.0, 0.0}};
  f.name = "sqrt_drift_2d";
  return f;
}

DriftField make_bump_drift(double c, double radius) {
  DriftField f;
  f.dim = 1;
  const double R = radius;
  auto psi = [](double u) -> double {
    const double u2 = u * u;
    if (u2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u2));
  };
  auto dpsi = [psi](double u) -> double {
    const double u2 = u * u;
    if (u2 >= 1.0) return 0.0;
    const double den = 1.0 - u2;
    return psi(u) * (-2.0 * u / (den * den));
  };
  f.eval = [c, R, psi](double, const Vec& x) -> Vec { return {c * psi(x[0] / R)}; };
  f.div = [c, R, dpsi](double, const Vec& x) { return c / R * dpsi(x[0] / R); };
  f.jac = [c, R, dpsi](double, const Vec& x) {
    Mat m(1);
    m(0, 0) = c / R * dpsi(x[0] / R);
    return m;
  };
  f.alpha = 1.0;
  f.sup_bound = std::abs(c);
  f.name = "bump";
  return f;
}

// ---- mollifier ----

double MollifierKernel::profile(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - r));
  const double b = std::exp(-1.0 / (r - 1.0));
  return a / (a + b);
}

double MollifierKernel::profile_deriv(double r) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - r));
  const double b = std::exp(-1.0 / (r - 1.0));
  const double ta = 2.0 - r, tb = r - 1.0;
  const double sum = a + b;
  return -(a * b) * (1.0 / (ta * ta) + 1.0 / (tb * tb)) / (sum * sum);
}

namespace {
double sphere_surface(int d) {
  // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
  return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}
}  // namespace

MollifierKernel::MollifierKernel(int dim, double epsilon) : dim_(dim), eps_(epsilon) {
  if (epsilon <= 0.0) throw ValidationError("MollifierKernel: epsilon must be > 0");
  if (dim < 1 || dim > kMaxDim) throw ValidationError("MollifierKernel: bad dimension");
  const double radial =
      gl_integrate(1.0, 2.0, 64, [dim](double r) { return profile(r) * std::pow(r, dim - 1); });
  norm_ = sphere_surface(dim) * (1.0 / dim + radial);
}

double MollifierKernel::operator()(const Vec& x) const {
  const double r = x.norm() / eps_;
  return profile(r) / (norm_ * std::pow(eps_, dim_));
}

Vec MollifierKernel::gradient(const Vec& x) const {
  const double rx = x.norm();
  Vec g(dim_);
  if (rx == 0.0) return g;
  const double ds = profile_deriv(rx / eps_);
  if (ds == 0.0) return g;
  // d/dx_i [profile(|x|/eps)/(Z eps^d)] = profile'(|x|/eps) x_i / (|x| eps Z eps^d)
  const double scale = ds / (rx * eps_ * norm_ * std::pow(eps_, dim_));
  for (int i = 0; i < dim_; ++i) g[i] = scale * x[i];
  return g;
}

double MollifierKernel::mass_quadrature(int nodes_per_axis) const {
  const GaussLegendre& gl = gauss_legendre(nodes_per_axis);
  Box box = Box::cube(dim_, support_radius());
  double mass = 0.0;
  for_each_tensor(box, gl.nodes, gl.weights, [&](const Vec& z, double w) { mass += w * (*this)(z); });
  return mass;
}

// Precomputed convolution rule: tensor Gauss-Legendre nodes over the kernel support with
// kernel value and kernel gradient folded into the weights.
namespace {
struct ConvRule {
  std::vector<Vec> z;
  std::vector<double> w_theta;
  std::vector<Vec> w_grad;
};

std::shared_ptr<const ConvRule> build_conv_rule(const MollifierKernel& k) {
  auto rule = std::make_shared<ConvRule>();
  const GaussLegendre& gl = gauss_legendre(kMollifyNodes);
  Box box = Box::cube(k.dim(), k.support_radius());
  double mass = 0.0, moment = 0.0;
  for_each_tensor(box, gl.nodes, gl.weights, [&](const Vec& z, double w) {
    const double th = w * k(z);
    Vec gr = k.gradient(z);
    gr *= w;
    mass += th;
    moment -= gr.dot(z) / k.dim();
    bool zero = th == 0.0;
    for (int i = 0; i < k.dim() && zero; ++i) zero = gr[i] == 0.0;
    if (zero) return;  // prune tensor corners outside the support ball
    rule->z.push_back(z);
    rule->w_theta.push_back(th);
    rule->w_grad.push_back(gr);
  });
  // Rescale so the discrete rule has exact unit mass and exact first gradient moment:
  // constant and affine fields (and their divergence) are then reproduced to roundoff,
  // and positivity of w_theta keeps mollification a sup-norm contraction.
  for (double& w : rule->w_theta) w /= mass;
  for (Vec& g : rule->w_grad) g *= 1.0 / moment;
  return rule;
}
}  // namespace

DriftField mollify(const DriftField& field, const MollifierKernel& kernel) {
  if (kernel.dim() != field.dim) throw ValidationError("mollify: kernel/field dimension mismatch");
  std::optional<Box> domain;
  if (field.domain) {
    Box shrunk = field.domain->shrunk(kernel.support_radius());
    if (!shrunk.valid())
      throw ValidationError("mollify: quadrature domain too small for requested eps (padding violation)");
    domain = shrunk;
  }

  auto rule = build_conv_rule(kernel);
  auto base = std::make_shared<DriftField>(field);
  const int d = field.dim;

  DriftField out;
  out.dim = d;
  out.eval = [rule, base, d](double t, const Vec& x) -> Vec {
    Vec acc(d);
    Vec y(d);
    for (std::size_t q = 0; q < rule->z.size(); ++q) {
      for (int i = 0; i < d; ++i) y[i] = x[i] - rule->z[q][i];
      Vec b = base->eval(t, y);
      const double w = rule->w_theta[q];
      for (int i = 0; i < d; ++i) acc[i] += w * b[i];
    }
    return acc;
  };
  out.div = [rule, base, d](double t, const Vec& x) -> double {
    double acc = 0.0;
    Vec y(d);
    for (std::size_t q = 0; q < rule->z.size(); ++q) {
      for (int i = 0; i < d; ++i) y[i] = x[i] - rule->z[q][i];
      Vec b = base->eval(t, y);
      acc += rule->w_grad[q].dot(b);
    }
    return acc;
  };
  out.jac = [rule, base, d](double t, const Vec& x) -> Mat {
    Mat acc(d);
    Vec y(d);
    for (std::size_t q = 0; q < rule->z.size(); ++q) {
      for (int i = 0; i < d; ++i) y[i] = x[i] - rule->z[q][i];
      Vec b = base->eval(t, y);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) acc(i, j) += b[i] * rule->w_grad[q][j];
    }
    return acc;
  };
  out.alpha = field.alpha;
  out.sup_bound = field.sup_bound;  // |b_eps| <= |b| by unit kernel mass
  out.time_dependent = field.time_dependent;
  out.domain = domain;
  out.name = field.name + "~eps=" + std::to_string(kernel.epsilon());
  return out;
}

double divergence(const DriftField& field, double t, const Vec& x, double h) {
  if (field.has_div()) return field.div(t, x);
  double acc = 0.0;
  for (int i = 0; i < field.dim; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    acc += (field(t, xp)[i] - field(t, xm)[i]) / (2.0 * h);
  }
  return acc;
}

namespace {
HolderReport holder_scan(const std::function<double(double, const Vec&, const Vec&)>& dist,
                         double alpha, const std::vector<Vec>& points,
                         const std::vector<double>& times, int max_points) {
  if (alpha <= 0.0 || alpha > 1.0) throw ValidationError("holder seminorm: alpha must be in (0,1]");
  if (points.size() < 2) throw ValidationError("holder seminorm: need at least two points");
  std::vector<Vec> pts;
  const int n = static_cast<int>(points.size());
  const int stride = (n + max_points - 1) / max_points;
  for (int i = 0; i < n; i += stride) pts.push_back(points[i]);

  HolderReport rep;
  rep.alpha = alpha;
  rep.points_given = n;
  rep.points_used = static_cast<int>(pts.size());
  for (double t : times) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double r = (pts[i] - pts[j]).norm();
        if (r == 0.0) continue;
        const double q = dist(t, pts[i], pts[j]) / std::pow(r, alpha);
        if (q > rep.value) {
          rep.value = q;
          rep.t_star = t;
          rep.x_star = pts[i];
          rep.y_star = pts[j];
        }
      }
    }
  }
  return rep;
}
}  // namespace

HolderReport estimate_holder_seminorm(const std::function<double(double, const Vec&)>& f,
                                      double alpha, const std::vector<Vec>& points,
                                      const std::vector<double>& times, int max_points) {
  return holder_scan(
      [&f](double t, const Vec& x, const Vec& y) { return std::abs(f(t, x) - f(t, y)); }, alpha,
      points, times, max_points);
}

HolderReport estimate_holder_seminorm(const DriftField& field, double alpha,
                                      const std::vector<Vec>& points,
                                      const std::vector<double>& times, int max_points) {
  return holder_scan(
      [&field](double t, const Vec& x, const Vec& y) { return (field(t, x) - field(t, y)).norm(); },
      alpha, points, times, max_points);
}

}  // namespace noiselab
