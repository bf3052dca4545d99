#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <memory>

#include "doctest.h"
#include "noiselab/errors.hpp"
#include "noiselab/fields.hpp"
#include "noiselab/flow.hpp"
#include "noiselab/quadrature.hpp"

using namespace noiselab;

namespace {
std::vector<Vec> line(double lo, double hi, int n) {
  std::vector<Vec> s;
  for (double x : uniform_nodes(lo, hi, n)) s.push_back(Vec{x});
  return s;
}
}  // namespace

TEST_CASE("forward Euler tracks the exponential flow") {
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 400);
  auto path = std::make_shared<WienerPath>(WienerPath::zero(g, 1));
  const FlowSample fs =
      integrate_forward(make_linear_drift(1.0), 0.0, 0, Vec{1.0}, path, EscapeBox::standard(1));
  CHECK(!fs.escaped);
  CHECK(std::abs(fs.at_index(0)[0] - 1.0) < 1e-15);
  CHECK(std::abs(fs.at_index(400)[0] - std::exp(1.0)) < 1.2e-2);
}

TEST_CASE("mid-anchor forward sample is anchored at its start index") {
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 100);
  auto path = std::make_shared<WienerPath>(11, 0, g, 1);
  const FlowSample fs =
      integrate_forward(make_zero_drift(1), 1.0, 50, Vec{0.3}, path, EscapeBox::standard(1));
  CHECK(fs.at_index(50)[0] == 0.3);
  // zero drift: the sample is exactly the translated noise
  CHECK(std::abs(fs.at_index(100)[0] - (0.3 + path->value(100)[0] - path->value(50)[0])) < 1e-14);
}

TEST_CASE("backward equation inverts the forward steps for zero drift") {
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 100);
  auto path = std::make_shared<WienerPath>(12, 0, g, 1);
  const EscapeBox esc = EscapeBox::standard(1);
  const FlowSample fwd = integrate_forward(make_zero_drift(1), 1.0, 0, Vec{0.4}, path, esc);
  const FlowSample bwd =
      integrate_backward(make_zero_drift(1), 1.0, 100, fwd.at_index(100), path, esc);
  CHECK(std::abs(bwd.at_index(0)[0] - 0.4) < 1e-13);  // exact inverse when b = 0
}

TEST_CASE("escape aborts the sample and reports the flag") {
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 200);
  auto path = std::make_shared<WienerPath>(WienerPath::zero(g, 1));
  const FlowSample fs =
      integrate_forward(make_linear_drift(6.0), 0.0, 0, Vec{1.0}, path, EscapeBox{Box::cube(1, 5.0)});
  CHECK(fs.escaped);
}

TEST_CASE("ensemble preserves order and knows its starts") {
  const TimeGrid g = TimeGrid::uniform(0.0, 0.5, 100);
  auto path = std::make_shared<WienerPath>(13, 0, g, 1);
  const FlowEnsemble ens(mollify(make_sqrt_drift(+1), MollifierKernel(1, 0.1)), 1.0, path,
                         line(-1.0, 1.0, 21), EscapeBox::standard(1));
  REQUIRE(ens.size() == 21);
  CHECK(ens.order_preserved());
  CHECK(!ens.any_escaped());
  CHECK(ens.injectivity_violations(1e-9) == 0);
  // flow_at at a start point returns the stored trajectory
  const Vec from_map = ens.flow_at(100, Vec{0.0});
  CHECK(from_map[0] == ens.sample(10).at_index(100)[0]);
  // off-grid starts integrate on the same noise
  const Vec off = ens.flow_at(100, Vec{0.05});
  CHECK(off[0] > from_map[0]);
}

TEST_CASE("inverse flow round trip on a smooth field") {
  const TimeGrid g = TimeGrid::uniform(0.0, 0.5, 200);
  auto path = std::make_shared<WienerPath>(14, 0, g, 1);
  const EscapeBox esc = EscapeBox::standard(1);
  const DriftField field = make_linear_drift(1.0);
  const FlowEnsemble ens(field, 1.0, path, line(-2.0, 2.0, 41), esc);
  const FlowSample fwd = integrate_forward(field, 1.0, 0, Vec{0.37}, path, esc);
  const double x_end = fwd.at_index(200)[0];

  const InverseResult inv = invert_flow(ens, 200, Vec{x_end});
  CHECK(!inv.extrapolated);
  CHECK(!inv.escaped);
  CHECK(std::abs(inv.point[0] - 0.37) < 2e-2);

  CHECK(std::abs(invert_flow_interpolated(ens, 200, x_end) - 0.37) < 2e-2);

  // far outside the image hull the inverse is flagged as extrapolated
  const InverseResult out = invert_flow(ens, 200, Vec{40.0});
  CHECK(out.extrapolated);
}

TEST_CASE("jacobians agree on a linear field") {
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 500);
  auto path = std::make_shared<WienerPath>(15, 0, g, 1);
  const EscapeBox esc = EscapeBox::standard(1);
  const DriftField field = make_linear_drift(1.0);

  const std::vector<double> J = jacobian_ode(field, 1.0, Vec{0.2}, path, esc);
  REQUIRE(J.size() == 501);
  CHECK(J[0] == 1.0);
  CHECK(std::abs(J[500] - std::exp(1.0)) < 1e-9);  // constant divergence: trapezoid is exact

  const std::vector<Mat> D = jacobian_variational(field, 1.0, Vec{0.2}, path, esc);
  REQUIRE(D.size() == 501);
  CHECK(D[0](0, 0) == 1.0);
  CHECK(std::abs(D[500](0, 0) - std::exp(1.0)) < 5e-3);  // (1 + a dt)^N bias

  const FlowEnsemble ens(field, 1.0, path, line(-2.0, 2.0, 41), esc);
  const JacobianFd fd = jacobian_fd(ens, 500, Vec{0.2}, 0.05);
  CHECK(!fd.near_singular);
  CHECK(std::abs(fd.det - D[500](0, 0)) < 1e-8);  // affine flow: interpolation is exact
}

TEST_CASE("flow composition concatenates exactly on shared noise") {
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 200);
  auto path = std::make_shared<WienerPath>(16, 0, g, 1);
  const double err = flow_composition_check(mollify(make_sqrt_drift(+1), MollifierKernel(1, 0.1)),
                                            1.0, path, 100, 200, line(-1.0, 1.0, 11),
                                            EscapeBox::standard(1));
  CHECK(err < 1e-12);
}

TEST_CASE("stability experiment validates its inputs") {
  StabilityConfig cfg;
  cfg.eps_ladder = {0.2, 0.1};
  cfg.n_paths = 10;  // refused below 100
  cfg.grid = TimeGrid::uniform(0.0, 1.0, 10);
  cfg.starts = line(-1.0, 1.0, 3);
  CHECK_THROWS_AS((void)stability_experiment(make_sqrt_drift(+1), cfg), ValidationError);
}
