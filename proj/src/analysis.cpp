#include "noiselab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "noiselab/errors.hpp"
#include "noiselab/parallel.hpp"
#include "noiselab/quadrature.hpp"

namespace noiselab {

namespace {

double sobolev_core(const std::vector<Vec>& pts, const std::vector<Vec>& vals, double w, double h,
                    int dim, double theta, double p) {
  const double expo = theta * p + dim;
  const double cut = 0.999 * h;  // same-cell pairs only; distinct centers are >= h apart
  const int n = static_cast<int>(pts.size());
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double dist = (pts[i] - pts[j]).norm();
      if (dist < cut) continue;
      const double diff = (vals[i] - vals[j]).norm();
      if (diff == 0.0) continue;
      sum += 2.0 * std::pow(diff, p) * std::pow(dist, -expo);
    }
  return sum * w * w;
}

SobolevReport seminorm_impl(const std::function<Vec(const Vec&)>& f, int dim, double r,
                            const SobolevParams& prm) {
  if (!(prm.theta > 0.0 && prm.theta < 1.0))
    throw ValidationError("fractional_sobolev_seminorm: theta must lie in (0,1)");
  if (prm.p < 1.0) throw ValidationError("fractional_sobolev_seminorm: p must be >= 1");
  if (!(r > 0.0)) throw ValidationError("fractional_sobolev_seminorm: radius must be positive");
  if (dim < 1 || dim > kMaxDim)
    throw ValidationError("fractional_sobolev_seminorm: dimension out of range");
  if (prm.base_cells < 2 || prm.levels < 2 || !(prm.refine > 1.0))
    throw ValidationError("fractional_sobolev_seminorm: need >= 2 cells, >= 2 levels, refine > 1");
  if (prm.lipschitz >= 0.0 && dim != 1)
    throw ValidationError(
        "fractional_sobolev_seminorm: the near-diagonal correction is implemented for d=1 only");

  SobolevReport rep;
  rep.theta = prm.theta;
  rep.p = prm.p;
  rep.radius = r;

  double cells_f = prm.base_cells;
  for (int l = 0; l < prm.levels; ++l) {
    const int cells = std::max(2, static_cast<int>(std::llround(cells_f)));
    const CellGrid g = cell_grid_ball(Vec::zero(dim), r, cells);
    std::vector<Vec> vals;
    vals.reserve(g.points.size());
    for (const Vec& x : g.points) vals.push_back(f(x));
    double s = sobolev_core(g.points, vals, g.weight, g.h, dim, prm.theta, prm.p);
    if (prm.lipschitz >= 0.0) {
      // Exact same-cell mass for affine f in d=1: per cell 2 Lip^p h^{q+1} / (q(q+1)).
      const double q = prm.p * (1.0 - prm.theta);
      s += static_cast<double>(g.points.size()) * std::pow(prm.lipschitz, prm.p) * 2.0 *
           std::pow(g.h, q + 1.0) / (q * (q + 1.0));
    }
    rep.levels.push_back({cells, g.h, s});
    cells_f *= prm.refine;
  }

  rep.value_p = rep.levels.back().value_p;
  rep.seminorm = rep.value_p > 0.0 ? std::pow(rep.value_p, 1.0 / prm.p) : 0.0;

  if (rep.levels.size() >= 3) {
    bool increasing = true, ratios_high = true;
    double prev_inc = 0.0;
    for (std::size_t l = 0; l + 1 < rep.levels.size(); ++l) {
      const double inc = rep.levels[l + 1].value_p - rep.levels[l].value_p;
      if (!(inc > 0.0)) increasing = false;
      if (l > 0 && (prev_inc <= 0.0 || inc / prev_inc < prm.divergence_ratio)) ratios_high = false;
      prev_inc = inc;
    }
    rep.divergent = increasing && ratios_high;
  }
  rep.diagonal_note = prm.lipschitz >= 0.0
                          ? "same-cell pairs excluded; Lipschitz near-diagonal mass restored"
                          : "same-cell pairs excluded; no Lipschitz constant declared";
  return rep;
}

}  // namespace

double sobolev_sum_from_samples(const std::vector<Vec>& points, const std::vector<double>& values,
                                double cell_weight, double cell_h, int dim, double theta, double p) {
  if (points.size() != values.size())
    throw ValidationError("sobolev_sum_from_samples: points/values size mismatch");
  std::vector<Vec> v;
  v.reserve(values.size());
  for (double x : values) v.push_back(Vec{x});
  return sobolev_core(points, v, cell_weight, cell_h, dim, theta, p);
}

SobolevReport fractional_sobolev_seminorm(const std::function<double(const Vec&)>& f, int dim,
                                          double r, const SobolevParams& prm) {
  return seminorm_impl([&f](const Vec& x) { return Vec{f(x)}; }, dim, r, prm);
}

SobolevReport fractional_sobolev_seminorm_vec(const std::function<Vec(const Vec&)>& f, int dim,
                                              double r, const SobolevParams& prm) {
  return seminorm_impl(f, dim, r, prm);
}

double commutator(const std::function<double(const Vec&)>& g, const DriftField& v, double t,
                  const MollifierKernel& kernel, const Vec& x) {
  if (v.dim != x.dim() || kernel.dim() != x.dim())
    throw ValidationError("commutator: dimension mismatch");
  const double eps = kernel.epsilon();
  Box box{x, x};
  box = box.padded(2.0 * eps);
  const GaussLegendre& gl = gauss_legendre(kMollifyNodes);
  const Vec vx = v(t, x);
  double term1 = 0.0, term2 = 0.0;
  bool bad_div = false;
  for_each_tensor(box, gl.nodes, gl.weights, [&](const Vec& y, double w) {
    const Vec z = x - y;
    if (z.norm() >= 2.0 * eps) return;  // outside the kernel support
    const double gy = g(y);
    term1 += w * gy * (vx - v(t, y)).dot(kernel.gradient(z));
    const double dv = divergence(v, t, y);
    if (!std::isfinite(dv)) {
      bad_div = true;
      return;
    }
    term2 += w * kernel(z) * gy * dv;
  });
  if (bad_div) throw NumericalError("commutator: div v not finite at a quadrature node");
  return term1 + term2;
}

TestDensity density_of(const TestFunction& rho) {
  Box w{rho.center, rho.center};
  w = w.padded(rho.radius);
  return {[rho](const Vec& x) { return rho(x); }, w};
}

double commutator_pairing(const std::function<double(const Vec&)>& g, const DriftField& v,
                          double t, const TestDensity& rho, double eps, int outer_cells) {
  if (!(eps > 0.0)) throw ValidationError("commutator_pairing: eps must be positive");
  if (outer_cells < 2) throw ValidationError("commutator_pairing: need >= 2 outer cells");
  const int d = rho.window.dim();
  if (v.dim != d) throw ValidationError("commutator_pairing: dimension mismatch");

  const MollifierKernel kernel(d, eps);
  const CellGrid outer = cell_grid(rho.window.padded(2.0 * eps), outer_cells);
  const Box zbox = Box::cube(d, 2.0 * eps);
  const GaussLegendre& gl = gauss_legendre(kMollifyNodes);

  // Inner rule over z with kernel values folded in; corners outside |z| < 2 eps dropped.
  struct Node {
    Vec z;
    double w, theta;
    Vec grad;
  };
  std::vector<Node> rule;
  for_each_tensor(zbox, gl.nodes, gl.weights, [&](const Vec& z, double w) {
    if (z.norm() >= 2.0 * eps) return;
    rule.push_back({z, w, kernel(z), kernel.gradient(z)});
  });

  double D = 0.0, c1 = 0.0, c2 = 0.0;
  bool bad_div = false;
  for (const Vec& x : outer.points) {
    const double rho_x = rho.fn(x);
    const Vec vx = v(t, x);
    double Dx = 0.0, conv_div = 0.0, conv_gdiv = 0.0;
    for (const Node& nd : rule) {
      const Vec y = x - nd.z;
      const double gy = g(y);
      Dx += nd.w * gy * (vx - v(t, y)).dot(nd.grad) * (rho_x - rho.fn(y));
      const double dv = divergence(v, t, y);
      if (!std::isfinite(dv)) {
        bad_div = true;
        continue;
      }
      conv_div += nd.w * nd.theta * dv;
      conv_gdiv += nd.w * nd.theta * gy * dv;
    }
    D += outer.weight * Dx;
    c1 += outer.weight * g(x) * rho_x * conv_div;
    c2 += outer.weight * rho_x * conv_gdiv;
  }
  if (bad_div) throw NumericalError("commutator_pairing: div v not finite at a quadrature node");
  return D - c1 + c2;
}

CommutatorReport commutator_ladder(const std::function<double(const Vec&)>& g,
                                   const DriftField& v, const TestFunction& rho,
                                   const PairingConfig& cfg) {
  if (cfg.eps_ladder.empty()) throw ValidationError("commutator_ladder: empty eps ladder");
  const int d = rho.center.dim();
  if (v.dim != d) throw ValidationError("commutator_ladder: dimension mismatch");

  CommutatorReport rep;
  rep.theta = cfg.theta;
  rep.alpha = cfg.alpha;
  rep.r = rho.center.norm() + rho.radius;
  rep.stability_factor = cfg.stability_factor;

  const TestDensity dens = density_of(rho);
  for (double eps : cfg.eps_ladder) {
    const double p = commutator_pairing(g, v, cfg.t, dens, eps, cfg.outer_cells);
    rep.eps.push_back(eps);
    rep.pairing.push_back(p);
    if (!std::isfinite(p)) rep.all_finite = false;
  }

  // eps-independent right-hand-side factors over B(r) / B(r+1).
  const double r1 = rep.r + 1.0;
  const CellGrid inner_grid = cell_grid_ball(Vec::zero(d), rep.r, cfg.factor_cells);
  const CellGrid outer_grid = cell_grid_ball(Vec::zero(d), r1, cfg.factor_cells);
  CommutatorFactors& F = rep.factors;
  for (const Vec& x : outer_grid.points) {
    F.g_sup = std::max(F.g_sup, std::abs(g(x)));
    const double dv = divergence(v, cfg.t, x);
    if (!std::isfinite(dv))
      throw ValidationError(
          "commutator_ladder: div v not finite at a factor-quadrature node; use even cell counts");
    F.div_l1 += outer_grid.weight * std::abs(dv);
  }
  for (const Vec& x : inner_grid.points) F.rho_sup = std::max(F.rho_sup, std::abs(rho(x)));

  F.rho_holder = estimate_holder_seminorm(
                     [&rho](double, const Vec& x) { return rho(x); }, 1.0 - cfg.theta,
                     inner_grid.points, {cfg.t})
                     .value;
  F.v_holder = estimate_holder_seminorm(v, cfg.alpha, outer_grid.points, {cfg.t}).value;

  SobolevParams sp;
  sp.theta = cfg.theta;
  sp.p = 1.0;
  sp.base_cells = std::max(8, cfg.factor_cells / 4);
  sp.levels = 3;
  sp.refine = 2.0;
  F.v_sobolev =
      fractional_sobolev_seminorm_vec([&v, &cfg](const Vec& x) { return v(cfg.t, x); }, d, r1, sp)
          .seminorm;
  SobolevParams sr = sp;
  sr.theta = 1.0 - cfg.alpha;
  F.rho_sobolev =
      fractional_sobolev_seminorm([&rho](const Vec& x) { return rho(x); }, d, rep.r, sr).seminorm;

  const double rhs = F.rhs_i();
  for (double p : rep.pairing) rep.fitted_c.push_back(rhs > 0.0 ? std::abs(p) / rhs : 0.0);
  rep.fit_stable = true;
  for (double c : rep.fitted_c)
    if (c > cfg.stability_factor * rep.fitted_c.front() + 1e-15) rep.fit_stable = false;
  return rep;
}

Diffeomorphism Diffeomorphism::identity(int dim) {
  Diffeomorphism d;
  d.dim = dim;
  d.forward = [](const Vec& x) { return x; };
  d.inverse = [](const Vec& x) { return x; };
  d.jac_inverse_det = [](const Vec&) { return 1.0; };
  return d;
}

Diffeomorphism Diffeomorphism::translation(const Vec& shift) {
  Diffeomorphism d;
  d.dim = shift.dim();
  d.forward = [shift](const Vec& x) { return x + shift; };
  d.inverse = [shift](const Vec& x) { return x - shift; };
  d.jac_inverse_det = [](const Vec&) { return 1.0; };
  return d;
}

Diffeomorphism Diffeomorphism::from_flow_1d(const FlowEnsemble& ens, int t_index) {
  if (ens.field().dim != 1) throw ValidationError("from_flow_1d: one-dimensional flows only");
  std::vector<std::pair<double, double>> xy;  // (start, image)
  for (int i = 0; i < ens.size(); ++i) {
    const FlowSample& s = ens.sample(i);
    if (s.escaped) throw NumericalError("from_flow_1d: an ensemble trajectory escaped");
    xy.emplace_back(s.start[0], s.at_index(t_index)[0]);
  }
  if (xy.size() < 2) throw ValidationError("from_flow_1d: need >= 2 starts");
  std::sort(xy.begin(), xy.end());
  for (std::size_t i = 0; i + 1 < xy.size(); ++i)
    if (!(xy[i + 1].second > xy[i].second))
      throw NumericalError("from_flow_1d: sampled flow snapshot is not strictly monotone");

  std::vector<double> xs, ys;
  for (auto& p : xy) {
    xs.push_back(p.first);
    ys.push_back(p.second);
  }
  // Piecewise-linear interpolation with end-segment extrapolation.
  auto interp = [](const std::vector<double>& a, const std::vector<double>& b, double t) {
    const int n = static_cast<int>(a.size());
    int k = static_cast<int>(std::upper_bound(a.begin(), a.end(), t) - a.begin()) - 1;
    k = std::clamp(k, 0, n - 2);
    const double s = (b[k + 1] - b[k]) / (a[k + 1] - a[k]);
    return b[k] + s * (t - a[k]);
  };
  auto slope = [](const std::vector<double>& a, const std::vector<double>& b, double t) {
    const int n = static_cast<int>(a.size());
    int k = static_cast<int>(std::upper_bound(a.begin(), a.end(), t) - a.begin()) - 1;
    k = std::clamp(k, 0, n - 2);
    return (b[k + 1] - b[k]) / (a[k + 1] - a[k]);
  };

  Diffeomorphism d;
  d.dim = 1;
  d.forward = [xs, ys, interp](const Vec& x) { return Vec{interp(xs, ys, x[0])}; };
  d.inverse = [xs, ys, interp](const Vec& y) { return Vec{interp(ys, xs, y[0])}; };
  d.jac_inverse_det = [xs, ys, slope](const Vec& y) { return slope(ys, xs, y[0]); };
  return d;
}

double commutator_with_flow(const std::function<double(const Vec&)>& g, const DriftField& v,
                            double t, const Diffeomorphism& phi, const TestFunction& rho,
                            double R, double eps, int outer_cells) {
  if (phi.dim != v.dim) throw ValidationError("commutator_with_flow: dimension mismatch");
  if (!(R > 0.0)) throw ValidationError("commutator_with_flow: window radius must be positive");
  const int d = phi.dim;
  const Box window = Box::cube(d, R);

  // supp(rho o phi^{-1}) must stay inside the window: probe the boundary cell layer.
  const CellGrid probe = cell_grid(window, outer_cells);
  for (const Vec& y : probe.points) {
    bool boundary = false;
    for (int i = 0; i < d; ++i)
      if (y[i] < window.lo[i] + probe.h || y[i] > window.hi[i] - probe.h) boundary = true;
    if (boundary && std::abs(rho(phi.inverse(y))) > 1e-12)
      throw ValidationError("commutator_with_flow: support containment failure on the window");
  }

  TestDensity dens;
  dens.window = window;
  dens.fn = [&phi, rho](const Vec& y) { return rho(phi.inverse(y)) * phi.jac_inverse_det(y); };
  return commutator_pairing(g, v, t, dens, eps, outer_cells);
}

JacobianProbeReport jacobian_sobolev_probe(const DriftField& base, double sigma, double alpha,
                                           double p, double r, const std::vector<double>& eps_ladder,
                                           std::shared_ptr<const WienerPath> path, int start_cells,
                                           int time_stride, int workers) {
  if (eps_ladder.size() < 3)
    throw ValidationError("jacobian_sobolev_probe: eps ladder needs at least 3 values");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("jacobian_sobolev_probe: alpha must lie in (0,1)");
  if (p < 1.0) throw ValidationError("jacobian_sobolev_probe: p must be >= 1");
  if (!path) throw ValidationError("jacobian_sobolev_probe: null path");
  if (start_cells < 2 || time_stride < 1)
    throw ValidationError("jacobian_sobolev_probe: bad grid parameters");
  const int d = base.dim;
  if (path->dim() != d) throw ValidationError("jacobian_sobolev_probe: field/path dim mismatch");

  JacobianProbeReport rep;
  rep.alpha = alpha;
  rep.p = p;
  rep.r = r;
  rep.p_in_window = p > 2.0 * d / (d + 2.0 * alpha);
  if (d < 2) rep.note = "exploratory d=1 run; the regularity statement concerns d >= 2";

  const CellGrid grid = cell_grid_ball(Vec::zero(d), r, start_cells);
  const int M = static_cast<int>(grid.points.size());
  const EscapeBox escape = EscapeBox::standard(d);
  const double theta_j = 1.0 - alpha;

  std::vector<int> sample_k;
  for (int k = 0; k <= path->grid().steps(); k += time_stride) sample_k.push_back(k);
  if (sample_k.back() != path->grid().steps()) sample_k.push_back(path->grid().steps());
  const int T = static_cast<int>(sample_k.size());

  for (double eps : eps_ladder) {
    const DriftField beps = mollify(base, MollifierKernel(d, eps));
    std::vector<std::vector<double>> J(T, std::vector<double>(M, 0.0));
    std::vector<std::uint8_t> bad(M, 0);
    std::vector<std::string> bad_msg(M);
    parallel_for(M, workers, [&](int j) {
      try {
        const std::vector<double> series = jacobian_ode(beps, sigma, grid.points[j], path, escape);
        for (int i = 0; i < T; ++i) J[i][j] = series[sample_k[i]];
      } catch (const std::exception& e) {
        bad[j] = 1;
        bad_msg[j] = e.what();
      }
    });
    for (int j = 0; j < M; ++j)
      if (bad[j])
        throw NumericalError("jacobian_sobolev_probe: start " + std::to_string(j) + ": " +
                             bad_msg[j]);

    double trace = 0.0;
    double prev = -1.0, prev_t = 0.0;
    for (int i = 0; i < T; ++i) {
      const double s =
          sobolev_sum_from_samples(grid.points, J[i], grid.weight, grid.h, d, theta_j, p);
      const double tt = path->grid().t[sample_k[i]];
      if (i > 0) trace += 0.5 * (prev + s) * (tt - prev_t);
      prev = s;
      prev_t = tt;
    }
    rep.eps.push_back(eps);
    rep.trace.push_back(trace);
  }

  bool monotone_grow = true;
  for (std::size_t i = 0; i + 1 < rep.trace.size(); ++i)
    if (!(rep.trace[i + 1] > rep.trace[i])) monotone_grow = false;
  rep.bounded = !(monotone_grow && rep.trace.back() > 2.0 * rep.trace.front());
  return rep;
}

}  // namespace noiselab
