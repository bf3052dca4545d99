#include "noiselab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "noiselab/errors.hpp"
#include "noiselab/parallel.hpp"

namespace noiselab {

const Vec& FlowSample::at_index(int k) const {
  if (forward) return states[k - anchor_index];
  return states[k];
}

FlowSample integrate_forward(const DriftField& field, double sigma, int s_index, const Vec& x,
                             std::shared_ptr<const WienerPath> path, const EscapeBox& escape) {
  const TimeGrid& g = path->grid();
  if (s_index < 0 || s_index > g.steps()) throw ValidationError("integrate_forward: bad start index");
  if (x.dim() != field.dim || path->dim() != field.dim)
    throw ValidationError("integrate_forward: dimension mismatch");

  FlowSample s;
  s.forward = true;
  s.anchor_index = s_index;
  s.start = x;
  s.path = path;
  s.states.reserve(g.steps() - s_index + 1);
  Vec X = x;
  s.states.push_back(X);
  for (int k = s_index; k < g.steps(); ++k) {
    if (!escape.box.contains(X)) {
      s.escaped = true;
      s.escape_node = k;
      break;
    }
    Vec b = field(g.t[k], X);
    X += g.dt(k) * b + sigma * path->increment(k);
    s.states.push_back(X);
  }
  if (!s.escaped && !escape.box.contains(X)) {
    s.escaped = true;
    s.escape_node = g.steps();
  }
  return s;
}

FlowSample integrate_backward(const DriftField& field, double sigma, int t_index, const Vec& x,
                              std::shared_ptr<const WienerPath> path, const EscapeBox& escape) {
  const TimeGrid& g = path->grid();
  if (t_index < 0 || t_index > g.steps()) throw ValidationError("integrate_backward: bad anchor index");
  if (x.dim() != field.dim || path->dim() != field.dim)
    throw ValidationError("integrate_backward: dimension mismatch");

  FlowSample s;
  s.forward = false;
  s.anchor_index = t_index;
  s.start = x;
  s.path = path;
  s.states.assign(t_index + 1, Vec::zero(field.dim));
  Vec Z = x;
  s.states[t_index] = Z;
  for (int k = t_index - 1; k >= 0; --k) {
    if (!escape.box.contains(Z)) {
      s.escaped = true;
      s.escape_node = k + 1;
      break;
    }
    // Z_k = Z_{k+1} - b(t_{k+1}, Z_{k+1}) dt_k - sigma dW_k
    Vec b = field(g.t[k + 1], Z);
    Z -= g.dt(k) * b + sigma * path->increment(k);
    s.states[k] = Z;
  }
  if (!s.escaped && !escape.box.contains(Z)) {
    s.escaped = true;
    s.escape_node = 0;
  }
  return s;
}

FlowEnsemble::FlowEnsemble(DriftField field, double sigma, std::shared_ptr<const WienerPath> path,
                           std::vector<Vec> starts, EscapeBox escape)
    : field_(std::move(field)), sigma_(sigma), path_(std::move(path)), starts_(std::move(starts)),
      escape_(escape) {
  if (starts_.empty()) throw ValidationError("FlowEnsemble: empty start grid");
  samples_.reserve(starts_.size());
  for (const Vec& x : starts_) samples_.push_back(integrate_forward(field_, sigma_, 0, x, path_, escape_));
}

bool FlowEnsemble::any_escaped() const {
  for (const FlowSample& s : samples_)
    if (s.escaped) return true;
  return false;
}

Vec FlowEnsemble::flow_at(int t_index, const Vec& x) const {
  for (std::size_t i = 0; i < starts_.size(); ++i)
    if ((starts_[i] - x).norm_inf() == 0.0 && !samples_[i].escaped)
      return samples_[i].at_index(t_index);
  FlowSample s = integrate_forward(field_, sigma_, 0, x, path_, escape_);
  if (s.escaped && s.escape_node <= t_index)
    throw NumericalError("flow_at: trajectory escaped the bounding box");
  return s.at_index(t_index);
}

int FlowEnsemble::injectivity_violations(double tol) const {
  int bad = 0;
  const int nodes = path_->grid().nodes();
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    for (std::size_t j = i + 1; j < samples_.size(); ++j) {
      if (samples_[i].escaped || samples_[j].escaped) continue;
      for (int k = 0; k < nodes; ++k) {
        if ((samples_[i].at_index(k) - samples_[j].at_index(k)).norm_inf() < tol) {
          ++bad;
          break;
        }
      }
    }
  }
  return bad;
}

bool FlowEnsemble::order_preserved() const {
  if (field_.dim != 1) throw ValidationError("order_preserved: d=1 only");
  std::vector<int> order(starts_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return starts_[a][0] < starts_[b][0]; });
  const int nodes = path_->grid().nodes();
  for (int k = 0; k < nodes; ++k)
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
      if (!(samples_[order[i]].at_index(k)[0] < samples_[order[i + 1]].at_index(k)[0])) return false;
  return true;
}

InverseResult invert_flow(const FlowEnsemble& ens, int t_index, const Vec& x) {
  InverseResult r;
  const int d = ens.field().dim;
  // Hull proxy: per-axis interval of the non-escaped image at time t.
  Vec lo = Vec::fill(d, std::numeric_limits<double>::infinity());
  Vec hi = Vec::fill(d, -std::numeric_limits<double>::infinity());
  for (int i = 0; i < ens.size(); ++i) {
    if (ens.sample(i).escaped) continue;
    const Vec& y = ens.sample(i).at_index(t_index);
    for (int c = 0; c < d; ++c) {
      lo[c] = std::min(lo[c], y[c]);
      hi[c] = std::max(hi[c], y[c]);
    }
  }
  for (int c = 0; c < d; ++c)
    if (x[c] < lo[c] || x[c] > hi[c]) r.extrapolated = true;

  FlowSample back = integrate_backward(ens.field(), ens.sigma(), t_index, x, ens.path(), ens.escape());
  r.escaped = back.escaped;
  r.point = back.escaped ? back.start : back.at_index(0);
  return r;
}

double invert_flow_interpolated(const FlowEnsemble& ens, int t_index, double x) {
  if (ens.field().dim != 1) throw ValidationError("invert_flow_interpolated: d=1 only");
  std::vector<std::pair<double, double>> map;  // (phi_t(x0), x0)
  for (int i = 0; i < ens.size(); ++i) {
    if (ens.sample(i).escaped) continue;
    map.emplace_back(ens.sample(i).at_index(t_index)[0], ens.starts()[i][0]);
  }
  if (map.size() < 2) throw ValidationError("invert_flow_interpolated: not enough samples");
  std::sort(map.begin(), map.end());
  if (x < map.front().first || x > map.back().first)
    throw ValidationError("invert_flow_interpolated: query outside the sampled image");
  auto it = std::lower_bound(map.begin(), map.end(), std::make_pair(x, -1e300));
  if (it == map.begin()) return it->second;
  auto prev = it - 1;
  const double u = (x - prev->first) / (it->first - prev->first);
  return prev->second + u * (it->second - prev->second);
}

JacobianFd jacobian_fd(const FlowEnsemble& ens, int t_index, const Vec& x, double h) {
  if (h <= 0.0) throw ValidationError("jacobian_fd: h must be > 0");
  const int d = ens.field().dim;
  JacobianFd out;
  out.d_phi = Mat(d);
  for (int j = 0; j < d; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    Vec fp = ens.flow_at(t_index, xp);
    Vec fm = ens.flow_at(t_index, xm);
    for (int i = 0; i < d; ++i) out.d_phi(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  out.det = out.d_phi.det();
  out.near_singular = std::abs(out.det) < 1e-12;
  return out;
}

std::vector<double> jacobian_ode(const DriftField& field, double sigma, const Vec& x,
                                 std::shared_ptr<const WienerPath> path, const EscapeBox& escape) {
  FlowSample s = integrate_forward(field, sigma, 0, x, path, escape);
  if (s.escaped) throw NumericalError("jacobian_ode: trajectory escaped the bounding box");
  const TimeGrid& g = path->grid();
  std::vector<double> J(g.nodes());
  double acc = 0.0;  // int_0^t div b along the trajectory, trapezoid
  J[0] = 1.0;
  double prev = divergence(field, g.t[0], s.at_index(0));
  if (!std::isfinite(prev))
    throw NumericalError("jacobian_ode: divergence not finite along the trajectory");
  for (int k = 1; k < g.nodes(); ++k) {
    const double cur = divergence(field, g.t[k], s.at_index(k));
    if (!std::isfinite(cur))
      throw NumericalError("jacobian_ode: divergence not finite along the trajectory");
    acc += 0.5 * (prev + cur) * g.dt(k - 1);
    J[k] = std::exp(acc);
    prev = cur;
  }
  return J;
}

std::vector<Mat> jacobian_variational(const DriftField& field, double sigma, const Vec& x,
                                      std::shared_ptr<const WienerPath> path,
                                      const EscapeBox& escape) {
  if (!field.has_jac()) throw ValidationError("jacobian_variational: field has no space Jacobian");
  FlowSample s = integrate_forward(field, sigma, 0, x, path, escape);
  if (s.escaped) throw NumericalError("jacobian_variational: trajectory escaped the bounding box");
  const TimeGrid& g = path->grid();
  const int d = field.dim;
  std::vector<Mat> D(g.nodes());
  D[0] = Mat::identity(d);
  for (int k = 1; k < g.nodes(); ++k) {
    Mat Db = field.jac(g.t[k - 1], s.at_index(k - 1));
    Mat step = Mat::identity(d);
    step += g.dt(k - 1) * Db;
    D[k] = step * D[k - 1];
  }
  return D;
}

double flow_composition_check(const DriftField& field, double sigma,
                              std::shared_ptr<const WienerPath> path, int s_index, int t_index,
                              const std::vector<Vec>& starts, const EscapeBox& escape) {
  if (s_index < 0 || t_index < s_index || t_index > path->grid().steps())
    throw ValidationError("flow_composition_check: need 0 <= s <= t on the grid");
  double worst = 0.0;
  for (const Vec& x : starts) {
    FlowSample whole = integrate_forward(field, sigma, 0, x, path, escape);
    if (whole.escaped) throw NumericalError("flow_composition_check: trajectory escaped");
    FlowSample second = integrate_forward(field, sigma, s_index, whole.at_index(s_index), path, escape);
    if (second.escaped) throw NumericalError("flow_composition_check: trajectory escaped");
    worst = std::max(worst, (second.at_index(t_index) - whole.at_index(t_index)).norm());
  }
  return worst;
}

StabilityReport stability_experiment(const DriftField& base, const StabilityConfig& cfg) {
  if (cfg.n_paths < 100)
    throw ValidationError("stability_experiment: fewer than 100 Monte Carlo paths refused");
  if (cfg.eps_ladder.empty()) throw ValidationError("stability_experiment: empty eps ladder");
  if (cfg.starts.empty()) throw ValidationError("stability_experiment: empty start grid");

  std::vector<DriftField> fields;
  fields.reserve(cfg.eps_ladder.size());
  for (double eps : cfg.eps_ladder) {
    if (eps > 0.0)
      fields.push_back(mollify(base, MollifierKernel(base.dim, eps)));
    else
      fields.push_back(base);
  }
  // Reference flow: the finest-eps entry of the ladder.
  std::size_t ref = 0;
  for (std::size_t n = 1; n < cfg.eps_ladder.size(); ++n)
    if (cfg.eps_ladder[n] < cfg.eps_ladder[ref]) ref = n;

  const EscapeBox escape = EscapeBox::standard(base.dim);
  const int L = static_cast<int>(fields.size());
  const int S = static_cast<int>(cfg.starts.size());
  const bool with_jac = [&] {
    for (const DriftField& f : fields)
      if (!f.has_jac()) return false;
    return true;
  }();

  // per path, per ladder entry, per start: sup-in-time displacement^p and Jacobian moment
  std::vector<std::vector<double>> disp(cfg.n_paths, std::vector<double>(L * S, 0.0));
  std::vector<std::vector<double>> jmom;
  if (with_jac) jmom.assign(cfg.n_paths, std::vector<double>(L * S, 0.0));

  parallel_for(cfg.n_paths, cfg.workers, [&](int m) {
    auto path = std::make_shared<const WienerPath>(cfg.seed, static_cast<std::uint64_t>(m),
                                                   cfg.grid, base.dim);
    for (int s = 0; s < S; ++s) {
      std::vector<FlowSample> traj;
      traj.reserve(L);
      for (int n = 0; n < L; ++n)
        traj.push_back(integrate_forward(fields[n], cfg.sigma, 0, cfg.starts[s], path, escape));
      const FlowSample& ref_traj = traj[ref];
      for (int n = 0; n < L; ++n) {
        double sup = 0.0;
        for (int k = 0; k < cfg.grid.nodes(); ++k)
          sup = std::max(sup, (traj[n].at_index(k) - ref_traj.at_index(k)).norm());
        disp[m][n * S + s] = std::pow(sup, cfg.p);
        if (with_jac) {
          std::vector<Mat> D = jacobian_variational(fields[n], cfg.sigma, cfg.starts[s], path, escape);
          double supj = 0.0;
          for (const Mat& Dk : D) supj = std::max(supj, Dk.frobenius());
          jmom[m][n * S + s] = std::pow(supj, cfg.p);
        }
      }
    }
  });

  StabilityReport rep;
  rep.eps = cfg.eps_ladder;
  rep.paths = cfg.n_paths;
  rep.displacement.assign(L, 0.0);
  rep.displacement_se.assign(L, 0.0);
  if (with_jac) rep.jacobian_moment.assign(L, 0.0);
  for (int n = 0; n < L; ++n) {
    double best_mean = -1.0, best_se = 0.0, best_j = -1.0;
    for (int s = 0; s < S; ++s) {
      double sum = 0.0, sum2 = 0.0, sumj = 0.0;
      for (int m = 0; m < cfg.n_paths; ++m) {  // index order: deterministic reduction
        const double v = disp[m][n * S + s];
        sum += v;
        sum2 += v * v;
        if (with_jac) sumj += jmom[m][n * S + s];
      }
      const double mean = sum / cfg.n_paths;
      const double var = std::max(0.0, sum2 / cfg.n_paths - mean * mean);
      if (mean > best_mean) {
        best_mean = mean;
        best_se = std::sqrt(var / cfg.n_paths);
      }
      if (with_jac) best_j = std::max(best_j, sumj / cfg.n_paths);
    }
    rep.displacement[n] = best_mean;
    rep.displacement_se[n] = best_se;
    if (with_jac) rep.jacobian_moment[n] = best_j;
  }
  rep.decreasing = true;
  for (int n = 0; n + 1 < L; ++n)
    if (!(rep.displacement[n + 1] < rep.displacement[n])) rep.decreasing = false;
  return rep;
}

}  // namespace noiselab
