#include "noiselab/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "noiselab/errors.hpp"
#include "noiselab/flow.hpp"
#include "noiselab/parallel.hpp"
#include "noiselab/quadrature.hpp"

namespace noiselab {

namespace {

// Largest singular value; gradient matrices here are at most 2x2.
double spectral_norm(const Mat& G) {
  if (G.dim() == 1) return std::abs(G(0, 0));
  if (G.dim() == 2) {
    const double a = G(0, 0) * G(0, 0) + G(1, 0) * G(1, 0);
    const double c = G(0, 1) * G(0, 1) + G(1, 1) * G(1, 1);
    const double b = G(0, 0) * G(0, 1) + G(1, 0) * G(1, 1);
    const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4.0 * b * b));
    return std::sqrt(std::max(0.0, 0.5 * (a + c + disc)));
  }
  throw ValidationError("spectral_norm: d <= 2 only");
}

// Tridiagonal solve with constant interior coefficients and Neumann mirror rows:
//   row 0:        diag v0 - 2a v1            = r0
//   interior j:  -a v_{j-1} + diag v_j - a v_{j+1} = r_j
//   row n-1:     -2a v_{n-2} + diag v_{n-1}  = r_{n-1}
void thomas_neumann(double a, double diag, std::vector<double>& rhs, std::vector<double>& cp) {
  const int n = static_cast<int>(rhs.size());
  cp.resize(n);
  // Forward sweep.
  cp[0] = -2.0 * a / diag;
  rhs[0] /= diag;
  for (int j = 1; j < n; ++j) {
    const double sub = (j == n - 1) ? -2.0 * a : -a;
    const double sup = -a;
    const double m = diag - sub * cp[j - 1];
    cp[j] = sup / m;
    rhs[j] = (rhs[j] - sub * rhs[j - 1]) / m;
  }
  for (int j = n - 2; j >= 0; --j) rhs[j] -= cp[j] * rhs[j + 1];
}

struct MarchSetup {
  std::vector<Vec> bnodes;
  std::vector<Vec> points;
  int n = 0;       // nodes per axis
  int total = 0;   // node count
  double h = 0.0, dtau = 0.0;
};

// dV/dtau = b.grad V + (sigma^2/2) Lap V + source - lambda V, V(0) = 0, mirror walls.
// Returns slices indexed by t (slice m = time m T / nt), terminal slice exactly zero.
std::vector<std::vector<double>> march(const MarchSetup& s, const std::vector<double>& source,
                                       double lambda, double sigma, int dim, int nt) {
  const int n = s.n, total = s.total;
  const double a = s.dtau * sigma * sigma / (2.0 * s.h * s.h);

  std::vector<std::vector<double>> out(nt + 1, std::vector<double>(total, 0.0));
  std::vector<double> V(total, 0.0), Vs(total, 0.0), line(n), cp(n);

  auto idx = [n, dim](int i, int j) { return dim == 1 ? i : j * n + i; };

  for (int m = 1; m <= nt; ++m) {
    // Explicit drift + source. Mirror ghosts make the normal derivative vanish at walls.
    const int jmax = dim == 1 ? 1 : n;
    for (int j = 0; j < jmax; ++j)
      for (int i = 0; i < n; ++i) {
        const int k = idx(i, j);
        double adv = 0.0;
        const double dx1 = (i == 0 || i == n - 1)
                               ? 0.0
                               : (V[idx(i + 1, j)] - V[idx(i - 1, j)]) / (2.0 * s.h);
        adv += s.bnodes[k][0] * dx1;
        if (dim == 2) {
          const double dx2 = (j == 0 || j == n - 1)
                                 ? 0.0
                                 : (V[idx(i, j + 1)] - V[idx(i, j - 1)]) / (2.0 * s.h);
          adv += s.bnodes[k][1] * dx2;
        }
        Vs[k] = V[k] + s.dtau * (adv + source[k]);
      }

    const double diag_x = 1.0 + lambda * s.dtau + 2.0 * a;
    if (dim == 1) {
      for (int i = 0; i < n; ++i) line[i] = Vs[i];
      thomas_neumann(a, diag_x, line, cp);
      for (int i = 0; i < n; ++i) V[i] = line[i];
    } else {
      // x sweep (carries the lambda term), then y sweep.
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) line[i] = Vs[idx(i, j)];
        thomas_neumann(a, diag_x, line, cp);
        for (int i = 0; i < n; ++i) Vs[idx(i, j)] = line[i];
      }
      const double diag_y = 1.0 + 2.0 * a;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) line[j] = Vs[idx(i, j)];
        thomas_neumann(a, diag_y, line, cp);
        for (int j = 0; j < n; ++j) V[idx(i, j)] = line[j];
      }
    }
    out[nt - m] = V;
  }
  return out;
}

MarchSetup make_setup(const DriftField& b, const Box& box, int nx, double T, int nt) {
  if (b.time_dependent)
    throw ValidationError("parabolic solver: static drift fields only");
  if (b.dim != box.dim()) throw ValidationError("parabolic solver: field/box dim mismatch");
  if (b.dim > 2) throw ValidationError("parabolic solver: d <= 2 only");
  if (nx < 4 || nt < 1 || !(T > 0.0))
    throw ValidationError("parabolic solver: need nx >= 4, nt >= 1, T > 0");
  for (int i = 1; i < box.dim(); ++i)
    if (std::abs(box.side(i) - box.side(0)) > 1e-12)
      throw ValidationError("parabolic solver: isotropic boxes only");

  MarchSetup s;
  s.n = nx + 1;
  s.total = b.dim == 1 ? s.n : s.n * s.n;
  s.h = box.side(0) / nx;
  s.dtau = T / nt;
  s.points.reserve(s.total);
  const int jmax = b.dim == 1 ? 1 : s.n;
  for (int j = 0; j < jmax; ++j)
    for (int i = 0; i < s.n; ++i) {
      Vec x(b.dim);
      x[0] = box.lo[0] + i * s.h;
      if (b.dim == 2) x[1] = box.lo[1] + j * s.h;
      s.points.push_back(x);
    }
  s.bnodes.reserve(s.total);
  double bmax = 0.0;
  for (const Vec& x : s.points) {
    s.bnodes.push_back(b(0.0, x));
    bmax = std::max(bmax, s.bnodes.back().norm_inf());
  }
  const double ratio = s.dtau * bmax / s.h;
  if (ratio > 1.0) {
    std::ostringstream msg;
    msg << "parabolic solver: explicit-drift step refused, dtau*sup|b|/dx = " << ratio << " > 1";
    throw NumericalError(msg.str());
  }
  return s;
}

ParabolicSolution pack(const Box& box, const DriftField& b, int nx, double T, int nt,
                       double lambda, double sigma, int components) {
  ParabolicSolution sol;
  sol.box = box;
  sol.dim = b.dim;
  sol.components = components;
  sol.nx = nx;
  sol.nt = nt;
  sol.T = T;
  sol.lambda = lambda;
  sol.sigma = sigma;
  sol.xs = uniform_nodes(box.lo[0], box.hi[0], nx + 1);
  return sol;
}

}  // namespace

int ParabolicSolution::node_count() const {
  return dim == 1 ? nodes_per_axis() : nodes_per_axis() * nodes_per_axis();
}

namespace {

// Per-axis clamped cell index and offset for multilinear interpolation.
void locate(const std::vector<double>& xs, double x, int& i0, double& f) {
  const int n = static_cast<int>(xs.size());
  const double h = xs[1] - xs[0];
  double s = (x - xs[0]) / h;
  s = std::clamp(s, 0.0, static_cast<double>(n - 1));
  i0 = std::min(static_cast<int>(s), n - 2);
  f = s - i0;
}

}  // namespace

double ParabolicSolution::interp(int c, int m, const Vec& x) const {
  int i0;
  double fx;
  locate(xs, x[0], i0, fx);
  if (dim == 1) return (1.0 - fx) * value(c, m, i0) + fx * value(c, m, i0 + 1);
  int j0;
  double fy;
  locate(xs, x[1], j0, fy);
  const double v00 = value(c, m, i0, j0), v10 = value(c, m, i0 + 1, j0);
  const double v01 = value(c, m, i0, j0 + 1), v11 = value(c, m, i0 + 1, j0 + 1);
  return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

namespace {

// Central-difference node gradient (one-sided at walls) of one component/slice.
Vec node_grad(const ParabolicSolution& s, int c, int m, int i, int j) {
  const int n = s.nodes_per_axis();
  const double h = s.h();
  Vec g(s.dim);
  const auto v = [&](int ii, int jj) { return s.value(c, m, ii, jj); };
  if (i == 0)
    g[0] = (v(1, j) - v(0, j)) / h;
  else if (i == n - 1)
    g[0] = (v(n - 1, j) - v(n - 2, j)) / h;
  else
    g[0] = (v(i + 1, j) - v(i - 1, j)) / (2.0 * h);
  if (s.dim == 2) {
    if (j == 0)
      g[1] = (v(i, 1) - v(i, 0)) / h;
    else if (j == n - 1)
      g[1] = (v(i, n - 1) - v(i, n - 2)) / h;
    else
      g[1] = (v(i, j + 1) - v(i, j - 1)) / (2.0 * h);
  }
  return g;
}

}  // namespace

Vec ParabolicSolution::grad_interp(int c, int m, const Vec& x) const {
  int i0;
  double fx;
  locate(xs, x[0], i0, fx);
  if (dim == 1) {
    const Vec g0 = node_grad(*this, c, m, i0, 0), g1 = node_grad(*this, c, m, i0 + 1, 0);
    return (1.0 - fx) * g0 + fx * g1;
  }
  int j0;
  double fy;
  locate(xs, x[1], j0, fy);
  const Vec g00 = node_grad(*this, c, m, i0, j0), g10 = node_grad(*this, c, m, i0 + 1, j0);
  const Vec g01 = node_grad(*this, c, m, i0, j0 + 1), g11 = node_grad(*this, c, m, i0 + 1, j0 + 1);
  return (1.0 - fy) * ((1.0 - fx) * g00 + fx * g10) + fy * ((1.0 - fx) * g01 + fx * g11);
}

namespace {

void locate_time(const ParabolicSolution& s, double t, int& m0, double& f) {
  double tt = t * s.nt / s.T;
  tt = std::clamp(tt, 0.0, static_cast<double>(s.nt));
  m0 = std::min(static_cast<int>(tt), s.nt - 1);
  f = tt - m0;
}

}  // namespace

Vec ParabolicSolution::U_at(double t, const Vec& x) const {
  int m0;
  double f;
  locate_time(*this, t, m0, f);
  Vec u(components <= kMaxDim ? components : kMaxDim);
  for (int c = 0; c < components; ++c)
    u[c] = (1.0 - f) * interp(c, m0, x) + f * interp(c, m0 + 1, x);
  return u;
}

Mat ParabolicSolution::gradU_at(double t, const Vec& x) const {
  int m0;
  double f;
  locate_time(*this, t, m0, f);
  Mat G(dim);
  for (int c = 0; c < components; ++c) {
    const Vec g = (1.0 - f) * grad_interp(c, m0, x) + f * grad_interp(c, m0 + 1, x);
    for (int i = 0; i < dim; ++i) G(c, i) = g[i];
  }
  return G;
}

double ParabolicSolution::sup_norm() const {
  double s = 0.0;
  for (const auto& comp : values)
    for (const auto& slice : comp)
      for (double v : slice) s = std::max(s, std::abs(v));
  return s;
}

double ParabolicSolution::sup_grad_norm() const {
  const int n = nodes_per_axis();
  double s = 0.0;
  const int jmax = dim == 1 ? 1 : n;
  for (int m = 0; m <= nt; ++m)
    for (int j = 0; j < jmax; ++j)
      for (int i = 0; i < n; ++i) {
        Mat G(dim);
        for (int c = 0; c < components; ++c) {
          const Vec g = node_grad(*this, c, m, i, j);
          for (int k = 0; k < dim; ++k) G(c, k) = g[k];
        }
        s = std::max(s, spectral_norm(G));
      }
  return s;
}

ParabolicSolution solve_backward_U(const DriftField& b, double lambda, double sigma,
                                   const Box& box, int nx, double T, int nt) {
  if (lambda < 0.0) throw ValidationError("solve_backward_U: lambda must be >= 0");
  if (!(sigma > 0.0)) throw ValidationError("solve_backward_U: sigma must be positive");
  const MarchSetup s = make_setup(b, box, nx, T, nt);
  ParabolicSolution sol = pack(box, b, nx, T, nt, lambda, sigma, b.dim);
  std::vector<double> source(s.total);
  for (int c = 0; c < b.dim; ++c) {
    for (int k = 0; k < s.total; ++k) source[k] = s.bnodes[k][c];
    sol.values.push_back(march(s, source, lambda, sigma, b.dim, nt));
  }
  return sol;
}

ParabolicSolution solve_F_eps(const DriftField& b_eps, const Box& box, int nx, double T, int nt) {
  const MarchSetup s = make_setup(b_eps, box, nx, T, nt);
  ParabolicSolution sol = pack(box, b_eps, nx, T, nt, 0.0, 1.0, 1);
  std::vector<double> source(s.total);
  for (int k = 0; k < s.total; ++k) {
    const double dv = divergence(b_eps, 0.0, s.points[k]);
    if (!std::isfinite(dv))
      throw NumericalError("solve_F_eps: div b not finite at a grid node");
    source[k] = -dv;
  }
  sol.values.push_back(march(s, source, 0.0, 1.0, b_eps.dim, nt));
  return sol;
}

std::vector<double> w1p_norm_per_time(const ParabolicSolution& sol, double p) {
  if (p < 1.0) throw ValidationError("w1p_norm_per_time: p must be >= 1");
  const int n = sol.nodes_per_axis();
  const std::vector<double> w1 = trapezoid_weights(sol.box.lo[0], sol.box.hi[0], n);
  std::vector<double> out;
  const int jmax = sol.dim == 1 ? 1 : n;
  for (int m = 0; m <= sol.nt; ++m) {
    double acc = 0.0;
    for (int j = 0; j < jmax; ++j)
      for (int i = 0; i < n; ++i) {
        const double w = sol.dim == 1 ? w1[i] : w1[i] * w1[j];
        const double v = sol.value(0, m, i, j);
        const double g = node_grad(sol, 0, m, i, j).norm();
        acc += w * (std::pow(std::abs(v), p) + std::pow(g, p));
      }
    out.push_back(std::pow(acc, 1.0 / p));
  }
  return out;
}

GradientBoundReport gradient_bound_check(const ParabolicSolution& sol) {
  GradientBoundReport rep;
  rep.sup_grad = sol.sup_grad_norm();
  rep.pass = rep.sup_grad <= rep.bound;
  return rep;
}

LambdaScanReport lambda_scan(const DriftField& b, double sigma, const Box& box, int nx, double T,
                             int nt, const std::vector<double>& lambdas, int workers) {
  if (lambdas.empty()) throw ValidationError("lambda_scan: empty ladder");
  LambdaScanReport rep;
  rep.lambdas = lambdas;
  rep.sup_grad.assign(lambdas.size(), 0.0);
  std::vector<std::string> err(lambdas.size());
  parallel_for(static_cast<int>(lambdas.size()), workers, [&](int i) {
    try {
      rep.sup_grad[i] = solve_backward_U(b, lambdas[i], sigma, box, nx, T, nt).sup_grad_norm();
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  });
  for (const std::string& e : err)
    if (!e.empty()) throw NumericalError("lambda_scan: " + e);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (rep.threshold < 0.0 && rep.sup_grad[i] <= 0.5) rep.threshold = lambdas[i];
    if (i > 0 && rep.sup_grad[i] > 1.05 * rep.sup_grad[i - 1]) rep.monotone = false;
  }
  return rep;
}

UFunction u_zero(int dim, const Box& valid) {
  UFunction u;
  u.value = [dim](double, const Vec&) { return Vec::zero(dim); };
  u.grad = [dim](double, const Vec&) { return Mat(dim); };
  u.valid_box = valid;
  return u;
}

UFunction u_constant_field(const Vec& c, double lambda, double T, const Box& valid) {
  UFunction u;
  const int d = c.dim();
  u.value = [c, lambda, T, d](double t, const Vec&) {
    const double s = T - t;
    Vec v = c;
    v *= lambda > 0.0 ? (1.0 - std::exp(-lambda * s)) / lambda : s;
    return v;
  };
  u.grad = [d](double, const Vec&) { return Mat(d); };
  u.valid_box = valid;
  return u;
}

UFunction u_from_solution(std::shared_ptr<const ParabolicSolution> sol, double margin_cells) {
  if (!sol) throw ValidationError("u_from_solution: null solution");
  UFunction u;
  u.value = [sol](double t, const Vec& x) { return sol->U_at(t, x); };
  u.grad = [sol](double t, const Vec& x) { return sol->gradU_at(t, x); };
  u.valid_box = sol->box.shrunk(margin_cells * sol->h());
  if (!u.valid_box.valid()) throw ValidationError("u_from_solution: margin empties the box");
  return u;
}

ZvonkinReport zvonkin_residual(const DriftField& b, double lambda, double sigma,
                               const UFunction& U, const ZvonkinConfig& cfg) {
  if (cfg.n_paths < 1) throw ValidationError("zvonkin_residual: need at least one path");
  if (cfg.x0.dim() != b.dim) throw ValidationError("zvonkin_residual: x0 dimension mismatch");
  if (std::abs(cfg.grid.t0()) > 1e-12)
    throw ValidationError("zvonkin_residual: time grid must start at 0");
  if (!U.valid_box.contains(cfg.x0))
    throw ValidationError("zvonkin_residual: x0 outside the U validity box");

  const int P = cfg.n_paths;
  std::vector<double> res(P, -1.0);  // -1 marks a dropped path
  const EscapeBox escape{U.valid_box};
  parallel_for(P, cfg.workers, [&](int m) {
    auto path = std::make_shared<const WienerPath>(
        WienerPath(cfg.seed, static_cast<std::uint64_t>(m), cfg.grid, b.dim));
    const FlowSample s = integrate_forward(b, sigma, 0, cfg.x0, path, escape);
    if (s.escaped) return;
    const Vec U0 = U.value(cfg.grid.t0(), cfg.x0);
    Vec lam_acc = Vec::zero(b.dim), ito_acc = Vec::zero(b.dim);
    double worst = 0.0;
    for (int k = 0; k <= cfg.grid.steps(); ++k) {
      const double t = cfg.grid.t[k];
      const Vec Xk = s.at_index(k);
      const Vec Uk = U.value(t, Xk);
      Vec predicted = cfg.x0 + U0 - Uk + lam_acc + ito_acc + sigma * path->value(k);
      worst = std::max(worst, (Xk - predicted).norm());
      if (k < cfg.grid.steps()) {
        if (lambda != 0.0) lam_acc += (lambda * cfg.grid.dt(k)) * Uk;
        ito_acc += sigma * (U.grad(t, Xk) * path->increment(k));
      }
    }
    res[m] = worst;
  });

  ZvonkinReport rep;
  rep.paths_total = P;
  for (double r : res) {
    if (r < 0.0) {
      ++rep.paths_dropped;
      continue;
    }
    rep.per_path.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
    rep.mean_residual += r;
  }
  if (!rep.per_path.empty()) rep.mean_residual /= static_cast<double>(rep.per_path.size());
  return rep;
}

}  // namespace noiselab
