#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <memory>

#include "doctest.h"
#include "noiselab/analysis.hpp"
#include "noiselab/errors.hpp"
#include "noiselab/fields.hpp"
#include "noiselab/quadrature.hpp"

using namespace noiselab;

TEST_CASE("fractional seminorm of a linear function on an interval") {
  SobolevParams prm;
  prm.theta = 0.5;
  prm.p = 1.0;
  prm.base_cells = 16;
  prm.levels = 3;
  prm.lipschitz = 1.0;
  const SobolevReport rep =
      fractional_sobolev_seminorm([](const Vec& x) { return x[0]; }, 1, 1.0, prm);
  // iint_{[-1,1]^2} |x-y|^{1/2} dx dy has the closed value (16/3) sqrt(2)
  const double exact = (16.0 / 3.0) * std::sqrt(2.0);
  CHECK(std::abs(rep.value_p - exact) / exact < 0.1);
  CHECK(!rep.divergent);
  CHECK(rep.levels.size() == 3);
  CHECK(rep.seminorm == std::pow(rep.value_p, 1.0 / prm.p));
}

TEST_CASE("fractional seminorm flags the critical jump case") {
  SobolevParams prm;
  prm.theta = 0.5;
  prm.p = 2.0;  // theta p = 1: log-divergent for a jump
  prm.base_cells = 16;
  prm.levels = 3;
  const SobolevReport rep = fractional_sobolev_seminorm(
      [](const Vec& x) { return x[0] >= 0.0 && x[0] < 1.0 ? 1.0 : 0.0; }, 1, 1.0, prm);
  CHECK(rep.divergent);
}

TEST_CASE("commutator of a divergence-free linear field against g = 1 vanishes") {
  const DriftField rot = make_rotation_drift();
  const MollifierKernel k(2, 0.1);
  auto one = [](const Vec&) { return 1.0; };
  CHECK(std::abs(commutator(one, rot, 0.0, k, Vec{0.0, 0.0})) < 1e-8);
  CHECK(std::abs(commutator(one, rot, 0.0, k, Vec{0.3, -0.2})) < 1e-8);
}

TEST_CASE("commutator shrinks with eps for smooth data") {
  const TestFunction g{Vec{0.35}, 1.0};
  const DriftField v = make_bump_drift(0.75, 1.1);
  auto gf = [g](const Vec& x) { return g(x); };
  const double r1 = std::abs(commutator(gf, v, 0.0, MollifierKernel(1, 0.2), Vec{0.0}));
  const double r2 = std::abs(commutator(gf, v, 0.0, MollifierKernel(1, 0.05), Vec{0.0}));
  CHECK(r2 < r1);
}

TEST_CASE("density window covers the bump support") {
  const TestDensity d = density_of(TestFunction{Vec{0.5}, 1.5});
  CHECK(d.window.lo[0] == -1.0);
  CHECK(d.window.hi[0] == 2.0);
  CHECK(d.fn(Vec{0.5}) == 1.0);
}

TEST_CASE("pairing rejects bad eps") {
  const TestDensity d = density_of(TestFunction{Vec{0.0}, 1.0});
  auto g = [](const Vec&) { return 1.0; };
  CHECK_THROWS_AS((void)commutator_pairing(g, make_zero_drift(1), 0.0, d, 0.0, 16),
                  ValidationError);
}

TEST_CASE("identity flow change of variables is the plain pairing") {
  const TestFunction g{Vec{0.35}, 1.2}, rho{Vec{0.0}, 1.0};
  const DriftField v = make_bump_drift(0.6, 1.0);
  auto gf = [g](const Vec& x) { return g(x); };
  const TestDensity same{[rho](const Vec& x) { return rho(x); }, Box::cube(1, 1.3)};
  const double direct = commutator_pairing(gf, v, 0.0, same, 0.1, 48);
  const double through_phi =
      commutator_with_flow(gf, v, 0.0, Diffeomorphism::identity(1), rho, 1.3, 0.1, 48);
  CHECK(std::abs(direct - through_phi) < 1e-12);
}

TEST_CASE("translated flow pairs against the translated density") {
  const TestFunction g{Vec{0.35}, 1.2}, rho{Vec{0.0}, 0.8};
  const DriftField v = make_bump_drift(0.6, 1.0);
  auto gf = [g](const Vec& x) { return g(x); };
  const TestFunction shifted{Vec{0.2}, 0.8};
  const TestDensity target{[shifted](const Vec& x) { return shifted(x); }, Box::cube(1, 1.4)};
  const double expect = commutator_pairing(gf, v, 0.0, target, 0.1, 48);
  const double got = commutator_with_flow(gf, v, 0.0, Diffeomorphism::translation(Vec{0.2}), rho,
                                          1.4, 0.1, 48);
  CHECK(std::abs(expect - got) < 1e-12);
}

TEST_CASE("flow change of variables refuses a leaking window") {
  const TestFunction rho{Vec{0.0}, 1.0};
  auto g = [](const Vec&) { return 1.0; };
  // R = 0.5 cuts the support of rho: the boundary probe must catch it
  CHECK_THROWS_AS((void)commutator_with_flow(g, make_zero_drift(1), 0.0,
                                             Diffeomorphism::identity(1), rho, 0.5, 0.1, 32),
                  ValidationError);
}

TEST_CASE("sampled flow snapshot behaves like the closed-form linear flow") {
  const TimeGrid tg = TimeGrid::uniform(0.0, 0.3, 300);
  auto path = std::make_shared<WienerPath>(WienerPath::zero(tg, 1));
  std::vector<Vec> starts;
  for (double x : uniform_nodes(-2.0, 2.0, 41)) starts.push_back(Vec{x});
  const FlowEnsemble ens(make_linear_drift(1.0), 0.0, path, starts, EscapeBox::standard(1));
  const Diffeomorphism phi = Diffeomorphism::from_flow_1d(ens, 300);
  const double scale = std::exp(0.3);
  CHECK(std::abs(phi.forward(Vec{0.55})[0] - 0.55 * scale) < 1e-3);
  CHECK(std::abs(phi.inverse(Vec{1.0})[0] - 1.0 / scale) < 1e-3);
  CHECK(std::abs(phi.jac_inverse_det(Vec{1.0}) - 1.0 / scale) < 1e-3);
  // round trip through the piecewise-linear tables
  CHECK(std::abs(phi.inverse(phi.forward(Vec{0.7}))[0] - 0.7) < 1e-9);
}

TEST_CASE("jacobian probe smoke on a one-dimensional ladder") {
  const TimeGrid tg = TimeGrid::uniform(0.0, 0.2, 50);
  auto path = std::make_shared<WienerPath>(31, 0, tg, 1);
  const JacobianProbeReport rep = jacobian_sobolev_probe(make_sqrt_drift(+1), 1.0, 0.5, 1.5, 1.0,
                                                         {0.2, 0.1, 0.05}, path, 4, 25, 1);
  REQUIRE(rep.trace.size() == 3);
  CHECK(rep.p_in_window);  // 1.5 > 2 d / (d + 2 alpha) = 1 in d = 1
  for (double t : rep.trace) CHECK(std::isfinite(t));
  CHECK_THROWS_AS((void)jacobian_sobolev_probe(make_sqrt_drift(+1), 1.0, 0.5, 1.5, 1.0,
                                               {0.2, 0.1}, path, 4, 25, 1),
                  ValidationError);
}
