#include "noiselab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "noiselab/errors.hpp"
#include "noiselab/parallel.hpp"
#include "noiselab/quadrature.hpp"

namespace noiselab {

namespace {

// exp(1 - 1/(1-u^2)) on |u|<1, 0 outside; peak 1 at u=0.
double bump_profile(double u) {
  const double s = u * u;
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s));
}

}  // namespace

InitialDatum datum_tanh() {
  InitialDatum d;
  d.value = [](const Vec& x) { return std::tanh(x[0]); };
  d.gradient = [](const Vec& x) {
    const double t = std::tanh(x[0]);
    return Vec{1.0 - t * t};
  };
  d.regularity = InitialDatum::Regularity::C1b;
  d.sup_bound = 1.0;
  d.name = "tanh";
  return d;
}

InitialDatum datum_constant(int dim, double c) {
  InitialDatum d;
  d.value = [c](const Vec&) { return c; };
  d.gradient = [dim](const Vec&) { return Vec::zero(dim); };
  d.regularity = InitialDatum::Regularity::C1b;
  d.sup_bound = std::abs(c);
  d.name = "constant";
  return d;
}

InitialDatum datum_sin(double k) {
  InitialDatum d;
  d.value = [k](const Vec& x) { return std::sin(k * x[0]); };
  d.gradient = [k](const Vec& x) { return Vec{k * std::cos(k * x[0])}; };
  d.regularity = InitialDatum::Regularity::C1b;
  d.sup_bound = 1.0;
  d.name = "sin";
  return d;
}

InitialDatum datum_bump(double center, double width) {
  if (width <= 0.0) throw ValidationError("datum_bump: width must be positive");
  InitialDatum d;
  d.value = [center, width](const Vec& x) { return bump_profile((x[0] - center) / width); };
  d.gradient = [center, width](const Vec& x) {
    const double u = (x[0] - center) / width;
    const double s = u * u;
    if (s >= 1.0) return Vec{0.0};
    const double om = 1.0 - s;
    return Vec{bump_profile(u) * (-2.0 * u / (om * om)) / width};
  };
  d.regularity = InitialDatum::Regularity::C1b;
  d.sup_bound = 1.0;
  d.name = "bump";
  return d;
}

InitialDatum datum_indicator(double a, double b) {
  if (!(a < b)) throw ValidationError("datum_indicator: need a < b");
  InitialDatum d;
  d.value = [a, b](const Vec& x) { return (x[0] >= a && x[0] < b) ? 1.0 : 0.0; };
  d.regularity = InitialDatum::Regularity::LInf;
  d.sup_bound = 1.0;
  d.name = "indicator";
  return d;
}

SpaceTimeGrid make_grid_1d(double lo, double hi, int n_points, std::vector<double> times) {
  if (!(lo < hi)) throw ValidationError("make_grid_1d: need lo < hi");
  if (n_points < 2) throw ValidationError("make_grid_1d: need at least 2 points");
  if (times.empty()) throw ValidationError("make_grid_1d: empty time list");
  SpaceTimeGrid g;
  g.times = std::move(times);
  for (double x : uniform_nodes(lo, hi, n_points)) g.points.push_back(Vec{x});
  return g;
}

namespace {

void check_grid(const SpaceTimeGrid& grid, int dim) {
  if (grid.times.empty() || grid.points.empty())
    throw ValidationError("solve: empty space-time grid");
  for (const Vec& p : grid.points)
    if (p.dim() != dim) throw ValidationError("solve: grid point dimension mismatch");
}

// Shared backward-characteristics driver. fan_tol < 0 disables fan masking.
TransportSolution solve_backward(const InitialDatum& u0, const DriftField& field, double sigma,
                                 std::shared_ptr<const WienerPath> path,
                                 const std::vector<int>& time_index, const SpaceTimeGrid& grid,
                                 const EscapeBox& escape, double fan_tol, double fan_fill,
                                 int workers) {
  const int nt = static_cast<int>(grid.times.size());
  const int np = static_cast<int>(grid.points.size());

  TransportSolution sol;
  sol.grid = grid;
  sol.sigma = sigma;
  sol.datum_regularity = u0.regularity;
  sol.datum_name = u0.name;
  sol.fan_fill = fan_fill;
  sol.values.assign(nt, std::vector<double>(np, 0.0));
  sol.preimages.assign(nt, std::vector<Vec>(np, Vec::zero(field.dim)));
  if (fan_tol >= 0.0) sol.fan.assign(nt, std::vector<std::uint8_t>(np, 0));

  std::vector<std::uint8_t> escaped(static_cast<std::size_t>(nt) * np, 0);
  parallel_for(nt * np, workers, [&](int job) {
    const int ti = job / np, xi = job % np;
    const FlowSample s =
        integrate_backward(field, sigma, time_index[ti], grid.points[xi], path, escape);
    if (s.escaped) {
      escaped[job] = 1;
      return;
    }
    const Vec pre = s.at_index(0);
    sol.preimages[ti][xi] = pre;
    bool fan_cell = false;
    if (fan_tol >= 0.0) {
      for (const Vec& p : field.degenerate_points)
        if ((pre - p).norm() <= fan_tol) fan_cell = true;
      if (fan_cell) sol.fan[ti][xi] = 1;
    }
    sol.values[ti][xi] = fan_cell ? fan_fill : u0.value(pre);
  });

  const long n_escaped = std::count(escaped.begin(), escaped.end(), std::uint8_t{1});
  if (n_escaped > 0) {
    const auto first = std::find(escaped.begin(), escaped.end(), std::uint8_t{1});
    const int job = static_cast<int>(first - escaped.begin());
    std::ostringstream msg;
    msg << "backward characteristic escaped the bounding box for " << n_escaped << " of "
        << nt * np << " grid nodes (first: t=" << grid.times[job / np]
        << ", x0=" << grid.points[job % np][0] << ")";
    throw NumericalError(msg.str());
  }
  return sol;
}

}  // namespace

TransportSolution solve_stochastic(const InitialDatum& u0, const DriftField& field, double sigma,
                                   std::shared_ptr<const WienerPath> path, const SpaceTimeGrid& grid,
                                   const EscapeBox& escape, int workers) {
  if (!path) throw ValidationError("solve_stochastic: null path");
  if (field.dim != path->dim()) throw ValidationError("solve_stochastic: field/path dim mismatch");
  check_grid(grid, field.dim);
  std::vector<int> tindex;
  tindex.reserve(grid.times.size());
  for (double t : grid.times) tindex.push_back(path->grid().index_of(t));

  TransportSolution sol =
      solve_backward(u0, field, sigma, path, tindex, grid, escape, -1.0, 0.0, workers);
  sol.method = TransportSolution::Method::Stochastic;
  sol.path = std::move(path);
  return sol;
}

TransportSolution solve_deterministic(const InitialDatum& u0, const DriftField& field,
                                      const SpaceTimeGrid& grid, double dt, double fan_fill,
                                      const EscapeBox& escape, double fan_tol, int workers) {
  if (dt <= 0.0) throw ValidationError("solve_deterministic: dt must be positive");
  if (fan_tol < 0.0) throw ValidationError("solve_deterministic: fan_tol must be >= 0");
  check_grid(grid, field.dim);

  double t_max = 0.0;
  for (double t : grid.times) {
    if (t < 0.0) throw ValidationError("solve_deterministic: negative time");
    t_max = std::max(t_max, t);
  }
  std::vector<int> tindex;
  for (double t : grid.times) {
    const double k = t / dt;
    const double rk = std::round(k);
    if (std::abs(k - rk) > 1e-9)
      throw ValidationError("solve_deterministic: output times must be multiples of dt");
    tindex.push_back(static_cast<int>(rk));
  }
  const int steps = std::max(1, static_cast<int>(std::round(t_max / dt)));
  auto zero = std::make_shared<const WienerPath>(
      WienerPath::zero(TimeGrid::uniform(0.0, steps * dt, steps), field.dim));

  TransportSolution sol =
      solve_backward(u0, field, 0.0, zero, tindex, grid, escape, fan_tol, fan_fill, workers);
  sol.method = TransportSolution::Method::Deterministic;
  return sol;
}

GradientDiagnostic gradient_diagnostic(const std::vector<TransportSolution>& levels) {
  if (levels.size() < 2) throw ValidationError("gradient_diagnostic: need at least 2 levels");
  const auto& times = levels.front().grid.times;
  GradientDiagnostic rep;
  rep.times = times;
  for (const auto& sol : levels) {
    if (sol.grid.points.empty() || sol.grid.points.front().dim() != 1)
      throw ValidationError("gradient_diagnostic: one-dimensional solutions only");
    if (sol.grid.times.size() != times.size())
      throw ValidationError("gradient_diagnostic: levels disagree on output times");
    for (std::size_t i = 0; i < times.size(); ++i)
      if (std::abs(sol.grid.times[i] - times[i]) > 1e-9)
        throw ValidationError("gradient_diagnostic: levels disagree on output times");
    std::vector<double> g(times.size(), 0.0);
    const auto& pts = sol.grid.points;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      double sup = 0.0;
      for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const double dx = pts[j + 1][0] - pts[j][0];
        if (dx <= 0.0) throw ValidationError("gradient_diagnostic: grid not strictly increasing");
        sup = std::max(sup, std::abs(sol.values[ti][j + 1] - sol.values[ti][j]) / dx);
      }
      g[ti] = sup;
    }
    rep.sup_gradient.push_back(std::move(g));
  }

  const int L = static_cast<int>(levels.size());
  // Blow-up: some time where every refinement multiplies the sup-gradient by >= growth.
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    bool grows = true;
    for (int l = 0; l + 1 < L; ++l) {
      const double a = rep.sup_gradient[l][ti], b = rep.sup_gradient[l + 1][ti];
      if (!(a > 1e-12 && b >= rep.blow_up_growth * a)) {
        grows = false;
        break;
      }
    }
    if (grows) {
      rep.verdict = GradientDiagnostic::Verdict::BlowUp;
      rep.blow_up_time = times[ti];
      return rep;
    }
  }
  // Bounded: finest two levels agree to rel_tol at every time.
  bool bounded = true;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double a = rep.sup_gradient[L - 2][ti], b = rep.sup_gradient[L - 1][ti];
    const double denom = std::max({a, b, 1e-12});
    if (std::abs(b - a) > rep.bounded_rel_tol * denom) {
      bounded = false;
      break;
    }
  }
  rep.verdict = bounded ? GradientDiagnostic::Verdict::Bounded
                        : GradientDiagnostic::Verdict::Inconclusive;
  return rep;
}

double TestFunction::operator()(const Vec& x) const {
  const double s = (x - center).norm2() / (radius * radius);
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s));
}

Vec TestFunction::grad(const Vec& x) const {
  const Vec y = x - center;
  const double s = y.norm2() / (radius * radius);
  if (s >= 1.0) return Vec::zero(x.dim());
  const double om = 1.0 - s;
  const double f = std::exp(1.0 - 1.0 / om);
  Vec g = y;
  g *= -2.0 * f / (om * om * radius * radius);
  return g;
}

double TestFunction::laplacian(const Vec& x) const {
  const double s = (x - center).norm2() / (radius * radius);
  if (s >= 1.0) return 0.0;
  const double om = 1.0 - s;
  const double f = std::exp(1.0 - 1.0 / om);
  const double om2 = om * om;
  // 4s/R^2 F'' + 2d/R^2 F' with F' = -F/om^2, F'' = F (1/om^4 - 2/om^3).
  return (2.0 * f / (radius * radius)) *
         (2.0 * s * (1.0 / (om2 * om2) - 2.0 / (om2 * om)) - x.dim() / om2);
}

WeakResidualReport weak_residual(const TransportSolution& u, const TestFunction& theta,
                                 const DriftField& field, double sigma, const WienerPath& path) {
  if (u.datum_regularity != InitialDatum::Regularity::C1b)
    throw ValidationError("weak_residual: needs a C1 datum (solution gradient)");
  if (field.dim != 1 || u.grid.points.front().dim() != 1 || theta.center.dim() != 1)
    throw ValidationError("weak_residual: one-dimensional only");
  const auto& times = u.grid.times;
  if (times.size() != static_cast<std::size_t>(path.grid().nodes()))
    throw ValidationError("weak_residual: solution must be sampled at every path node");
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - path.grid().t[k]) > 1e-9)
      throw ValidationError("weak_residual: solution times differ from path nodes");

  const int np = static_cast<int>(u.grid.points.size());
  std::vector<double> xs(np);
  for (int j = 0; j < np; ++j) xs[j] = u.grid.points[j][0];
  const double dx = xs[1] - xs[0];
  for (int j = 0; j + 1 < np; ++j)
    if (std::abs(xs[j + 1] - xs[j] - dx) > 1e-9 * std::max(1.0, std::abs(dx)))
      throw ValidationError("weak_residual: space grid must be uniform");
  if (!(theta.center[0] - theta.radius > xs.front() && theta.center[0] + theta.radius < xs.back()))
    throw ValidationError("weak_residual: test-function support must lie inside the space grid");

  const std::vector<double> w = trapezoid_weights(xs.front(), xs.back(), np);

  const int nt = static_cast<int>(times.size());
  std::vector<double> I(nt, 0.0), D(nt, 0.0), Lp(nt, 0.0), V(nt, 0.0);
  for (int k = 0; k < nt; ++k) {
    const double t = times[k];
    for (int j = 0; j < np; ++j) {
      const Vec xv{xs[j]};
      const double th = theta(xv);
      if (th == 0.0) continue;
      const double uval = u.values[k][j];
      double du;
      if (j == 0)
        du = (u.values[k][1] - uval) / dx;
      else if (j == np - 1)
        du = (uval - u.values[k][np - 2]) / dx;
      else
        du = (u.values[k][j + 1] - u.values[k][j - 1]) / (2.0 * dx);
      I[k] += w[j] * uval * th;
      D[k] += w[j] * field(t, xv)[0] * du * th;
      Lp[k] += w[j] * uval * theta.laplacian(xv);
      V[k] += w[j] * uval * theta.grad(xv)[0];
    }
  }

  WeakResidualReport rep;
  rep.times = times;
  rep.residual.assign(nt, 0.0);
  rep.drift_term.assign(nt, 0.0);
  rep.laplace_term.assign(nt, 0.0);
  rep.ito_term.assign(nt, 0.0);
  for (int k = 1; k < nt; ++k) {
    const double dt = times[k] - times[k - 1];
    rep.drift_term[k] = rep.drift_term[k - 1] + dt * D[k - 1];
    rep.laplace_term[k] = rep.laplace_term[k - 1] + 0.5 * sigma * sigma * dt * Lp[k - 1];
    rep.ito_term[k] = rep.ito_term[k - 1] + sigma * V[k - 1] * path.increment(k - 1)[0];
    rep.residual[k] =
        I[k] - I[0] + rep.drift_term[k] - rep.laplace_term[k] - rep.ito_term[k];
    rep.max_abs = std::max(rep.max_abs, std::abs(rep.residual[k]));
  }
  return rep;
}

WeakStarReport stability_weakstar(const std::vector<BoundedFunction>& v_seq,
                                  const BoundedFunction& v_limit, const DriftField& field,
                                  double sigma, std::shared_ptr<const WienerPath> path,
                                  const TestFunction& f, const Box& K, int quad_cells,
                                  const std::vector<int>& time_indices, int workers) {
  if (!path) throw ValidationError("stability_weakstar: null path");
  if (v_seq.empty()) throw ValidationError("stability_weakstar: empty sequence");
  for (const auto& v : v_seq)
    if (!v.fn || !(v.sup_bound > 0.0))
      throw ValidationError("stability_weakstar: every sequence entry needs a positive sup bound");
  if (!v_limit.fn) throw ValidationError("stability_weakstar: limit function missing");
  if (quad_cells < 2) throw ValidationError("stability_weakstar: need at least 2 cells per axis");
  if (time_indices.empty()) throw ValidationError("stability_weakstar: no tested times");
  for (int k : time_indices)
    if (k < 0 || k > path->grid().steps())
      throw ValidationError("stability_weakstar: time index off the path grid");

  const CellGrid g = cell_grid(K, quad_cells);
  const int M = static_cast<int>(g.points.size());
  const int T = static_cast<int>(time_indices.size());
  const EscapeBox escape = EscapeBox::standard(field.dim);

  // G[i][j] = f(phi_{t_i}(x_j)) * J(t_i, x_j) * cell weight, one flow solve per point.
  std::vector<std::vector<double>> G(T, std::vector<double>(M, 0.0));
  std::vector<std::uint8_t> bad(M, 0);
  std::vector<std::string> bad_msg(M);
  parallel_for(M, workers, [&](int j) {
    try {
      const FlowSample s = integrate_forward(field, sigma, 0, g.points[j], path, escape);
      if (s.escaped) {
        bad[j] = 1;
        bad_msg[j] = "trajectory escaped the bounding box";
        return;
      }
      const std::vector<double> J = jacobian_ode(field, sigma, g.points[j], path, escape);
      for (int i = 0; i < T; ++i) {
        const int k = time_indices[i];
        G[i][j] = f(s.at_index(k)) * J[k] * g.weight;
      }
    } catch (const std::exception& e) {
      bad[j] = 1;
      bad_msg[j] = e.what();
    }
  });
  for (int j = 0; j < M; ++j)
    if (bad[j])
      throw NumericalError("stability_weakstar: quadrature point " + std::to_string(j) + ": " +
                           bad_msg[j]);

  std::vector<double> abs_mass(T, 0.0);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < M; ++j) abs_mass[i] += std::abs(G[i][j]);
  const double max_abs_mass = *std::max_element(abs_mass.begin(), abs_mass.end());

  WeakStarReport rep;
  for (const auto& vn : v_seq) {
    double a = 0.0, grid_sup = 0.0;
    for (int i = 0; i < T; ++i) {
      double s = 0.0;
      for (int j = 0; j < M; ++j) {
        const double c = v_limit.fn(g.points[j]) - vn.fn(g.points[j]);
        s += c * G[i][j];
        if (i == 0) grid_sup = std::max(grid_sup, std::abs(c));
      }
      a = std::max(a, std::abs(s));
    }
    rep.a.push_back(a);
    rep.direct_bound.push_back(grid_sup * max_abs_mass);
    if (a > rep.direct_bound.back() + 1e-12) rep.bounds_hold = false;
  }

  // Support control: f composed with the flow should stay negligible on corners of K.
  std::vector<Vec> corners;
  const int ncorner = 1 << field.dim;
  for (int c = 0; c < ncorner; ++c) {
    Vec p = Vec::zero(field.dim);
    for (int i = 0; i < field.dim; ++i) p[i] = (c & (1 << i)) ? K.hi[i] : K.lo[i];
    corners.push_back(p);
  }
  for (const Vec& p : corners) {
    const FlowSample s = integrate_forward(field, sigma, 0, p, path, escape);
    if (s.escaped) continue;  // outside the support window entirely
    for (int k : time_indices) rep.boundary_leak = std::max(rep.boundary_leak, std::abs(f(s.at_index(k))));
  }
  return rep;
}

EnergyReport energy_identity_check(const TransportSolution& u, const DriftField& field) {
  if (u.sigma != 0.0 || u.method != TransportSolution::Method::Deterministic)
    throw ValidationError("energy_identity_check: deterministic (sigma = 0) solutions only");
  if (u.grid.points.front().dim() != 1)
    throw ValidationError("energy_identity_check: one-dimensional only");
  const int np = static_cast<int>(u.grid.points.size());
  std::vector<double> xs(np);
  for (int j = 0; j < np; ++j) xs[j] = u.grid.points[j][0];
  const std::vector<double> w = trapezoid_weights(xs.front(), xs.back(), np);

  const int nt = static_cast<int>(u.grid.times.size());
  std::vector<double> E(nt, 0.0), Dv(nt, 0.0);
  for (int k = 0; k < nt; ++k) {
    for (int j = 0; j < np; ++j) {
      const double uv = u.values[k][j];
      const double dv = divergence(field, u.grid.times[k], u.grid.points[j]);
      if (!std::isfinite(dv))
        throw ValidationError(
            "energy_identity_check: div b not finite at a quadrature node; choose a grid "
            "avoiding the declared singular points");
      E[k] += w[j] * uv * uv;
      Dv[k] += w[j] * uv * uv * dv;
    }
  }

  EnergyReport rep;
  rep.window = Box::interval(xs.front(), xs.back());
  rep.times = u.grid.times;
  rep.energy = E;
  rep.residual.assign(nt, 0.0);
  double acc = 0.0;
  for (int k = 1; k < nt; ++k) {
    acc += 0.5 * (Dv[k - 1] + Dv[k]) * (u.grid.times[k] - u.grid.times[k - 1]);
    rep.residual[k] = E[k] - E[0] - acc;
  }
  return rep;
}

double transport_relation_error(const InitialDatum& u0, const DriftField& field, double sigma,
                                std::shared_ptr<const WienerPath> path,
                                const std::vector<Vec>& starts, const std::vector<int>& time_indices,
                                const EscapeBox& escape) {
  if (!path) throw ValidationError("transport_relation_error: null path");
  double worst = 0.0;
  for (const Vec& x : starts) {
    const FlowSample fwd = integrate_forward(field, sigma, 0, x, path, escape);
    if (fwd.escaped) throw NumericalError("transport_relation_error: forward trajectory escaped");
    const double ref = u0.value(x);
    for (int k : time_indices) {
      const FlowSample bwd = integrate_backward(field, sigma, k, fwd.at_index(k), path, escape);
      if (bwd.escaped)
        throw NumericalError("transport_relation_error: backward trajectory escaped");
      worst = std::max(worst, std::abs(u0.value(bwd.at_index(0)) - ref));
    }
  }
  return worst;
}

double coalescence_meet_time(const DriftField& field, double x0, const TimeGrid& grid, double tol) {
  if (field.dim != 1) throw ValidationError("coalescence_meet_time: one-dimensional only");
  auto zero = std::make_shared<const WienerPath>(WienerPath::zero(grid, 1));
  const EscapeBox escape = EscapeBox::standard(1);
  const FlowSample plus = integrate_forward(field, 0.0, 0, Vec{x0}, zero, escape);
  const FlowSample minus = integrate_forward(field, 0.0, 0, Vec{-x0}, zero, escape);
  if (plus.escaped || minus.escaped)
    throw NumericalError("coalescence_meet_time: trajectory escaped");
  for (int k = 0; k <= grid.steps(); ++k)
    if (std::abs(plus.at_index(k)[0] - minus.at_index(k)[0]) < tol) return grid.t[k];
  return -1.0;
}

double ode_integral_residual(const DriftField& field, const std::function<Vec(double)>& X,
                             const TimeGrid& grid) {
  Vec acc = Vec::zero(field.dim);
  double worst = 0.0;
  const Vec x0 = X(grid.t0());
  Vec prev_b = field(grid.t0(), x0);
  for (int k = 1; k <= grid.steps(); ++k) {
    const Vec xk = X(grid.t[k]);
    const Vec bk = field(grid.t[k], xk);
    Vec mid = prev_b + bk;
    mid *= 0.5 * grid.dt(k - 1);
    acc += mid;
    worst = std::max(worst, (xk - x0 - acc).norm());
    prev_b = bk;
  }
  return worst;
}

}  // namespace noiselab
