#include "noiselab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "noiselab/errors.hpp"

namespace noiselab {

namespace {

GaussLegendre compute_gl(int n) {
  if (n < 1) throw ValidationError("gauss_legendre: order must be >= 1");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  // Roots of P_n by Newton from the Chebyshev-like initial guess; symmetric pair fill.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Recurrence for P_n(x) and P_{n-1}(x).
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  static std::map<int, GaussLegendre> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gl(order)).first;
  return it->second;
}

double gl_integrate(double a, double b, int order, const std::function<double(double)>& f) {
  const GaussLegendre& gl = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * f(mid + half * gl.nodes[i]);
  return s * half;
}

std::vector<double> uniform_nodes(double a, double b, int n) {
  if (n < 2) throw ValidationError("uniform_nodes: need n >= 2");
  std::vector<double> xs(n);
  const double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) xs[i] = a + i * h;
  xs.back() = b;
  return xs;
}

std::vector<double> cell_centers(double a, double b, int n) {
  if (n < 1) throw ValidationError("cell_centers: need n >= 1");
  std::vector<double> xs(n);
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) xs[i] = a + (i + 0.5) * h;
  return xs;
}

std::vector<double> trapezoid_weights(double a, double b, int n) {
  std::vector<double> w(n, (b - a) / (n - 1));
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

void for_each_tensor(const Box& box, const std::vector<double>& ref_nodes,
                     const std::vector<double>& ref_weights,
                     const std::function<void(const Vec&, double)>& fn) {
  const int d = box.dim();
  const int n = static_cast<int>(ref_nodes.size());
  // Per-axis scaled nodes/weights.
  std::array<std::vector<double>, kMaxDim> nodes, weights;
  for (int i = 0; i < d; ++i) {
    const double mid = 0.5 * (box.lo[i] + box.hi[i]), half = 0.5 * box.side(i);
    nodes[i].resize(n);
    weights[i].resize(n);
    for (int k = 0; k < n; ++k) {
      nodes[i][k] = mid + half * ref_nodes[k];
      weights[i][k] = half * ref_weights[k];
    }
  }
  std::array<int, kMaxDim> idx{};
  Vec x(d);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      x[i] = nodes[i][idx[i]];
      w *= weights[i][idx[i]];
    }
    fn(x, w);
    int axis = 0;
    while (axis < d && ++idx[axis] == n) idx[axis++] = 0;
    if (axis == d) break;
  }
}

CellGrid cell_grid(const Box& box, int cells_per_axis) {
  const int d = box.dim();
  CellGrid g;
  g.weight = 1.0;
  for (int i = 0; i < d; ++i) g.weight *= box.side(i) / cells_per_axis;
  g.h = box.side(0) / cells_per_axis;
  std::array<std::vector<double>, kMaxDim> axes;
  for (int i = 0; i < d; ++i) axes[i] = cell_centers(box.lo[i], box.hi[i], cells_per_axis);
  std::array<int, kMaxDim> idx{};
  while (true) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = axes[i][idx[i]];
    g.points.push_back(x);
    int axis = 0;
    while (axis < d && ++idx[axis] == cells_per_axis) idx[axis++] = 0;
    if (axis == d) break;
  }
  return g;
}

CellGrid cell_grid_ball(const Vec& center, double r, int cells_per_axis) {
  Box box;
  box.lo = center;
  box.hi = center;
  for (int i = 0; i < center.dim(); ++i) {
    box.lo[i] -= r;
    box.hi[i] += r;
  }
  CellGrid g = cell_grid(box, cells_per_axis);
  CellGrid out;
  out.weight = g.weight;
  out.h = g.h;
  for (const Vec& x : g.points)
    if ((x - center).norm() <= r) out.points.push_back(x);
  return out;
}

}  // namespace noiselab
