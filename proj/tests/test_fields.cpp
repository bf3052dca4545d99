#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "noiselab/errors.hpp"
#include "noiselab/fields.hpp"
#include "noiselab/quadrature.hpp"

using namespace noiselab;

TEST_CASE("square-root drift values and structure") {
  const DriftField plus = make_sqrt_drift(+1);
  CHECK(plus.alpha == 0.5);
  CHECK(std::abs(plus(0.0, Vec{0.25})[0] - 1.0) < 1e-15);
  CHECK(std::abs(plus(0.0, Vec{-0.25})[0] + 1.0) < 1e-15);
  CHECK(plus(0.0, Vec{0.0})[0] == 0.0);
  CHECK(std::abs(divergence(plus, 0.0, Vec{0.25}) - 2.0) < 1e-12);
  REQUIRE(!plus.degenerate_points.empty());
  CHECK(plus.degenerate_points.front()[0] == 0.0);
  REQUIRE(!plus.div_singularities.empty());

  const DriftField minus = make_sqrt_drift(-1);
  CHECK(std::abs(minus(0.0, Vec{0.25})[0] + 1.0) < 1e-15);
}

TEST_CASE("divergence falls back to central differences") {
  DriftField f;
  f.dim = 1;
  f.eval = [](double, const Vec& x) { return Vec{std::sin(x[0])}; };
  CHECK(std::abs(divergence(f, 0.0, Vec{0.3}) - std::cos(0.3)) < 1e-7);
}

TEST_CASE("simple fields") {
  const DriftField lin = make_linear_drift(2.0);
  CHECK(std::abs(lin(0.0, Vec{0.7})[0] - 1.4) < 1e-15);
  CHECK(std::abs(divergence(lin, 0.0, Vec{0.7}) - 2.0) < 1e-12);
  REQUIRE(lin.has_jac());
  CHECK(std::abs(lin.jac(0.0, Vec{0.7})(0, 0) - 2.0) < 1e-15);

  const DriftField rot = make_rotation_drift();
  const Vec r = rot(0.0, Vec{1.0, 0.0});
  CHECK(std::abs(r[0]) < 1e-15);
  CHECK(std::abs(r[1] - 1.0) < 1e-15);
  CHECK(std::abs(divergence(rot, 0.0, Vec{0.4, -0.3})) < 1e-12);

  const DriftField c = make_constant_drift(Vec{2.0, -1.0});
  CHECK(c.dim == 2);
  CHECK(std::abs(divergence(c, 0.0, Vec{0.1, 0.1})) < 1e-12);

  const DriftField z = make_zero_drift(1);
  CHECK(z(0.5, Vec{3.0})[0] == 0.0);
}

TEST_CASE("tensor square-root drift in two dimensions") {
  const DriftField b = make_sqrt_drift_2d();
  const Vec v = b(0.0, Vec{0.25, 0.25});
  CHECK(std::abs(v[0] - 1.0) < 1e-15);
  CHECK(std::abs(v[1] - 1.0) < 1e-15);
  CHECK(std::abs(divergence(b, 0.0, Vec{0.25, 0.25}) - 4.0) < 1e-12);
  CHECK(b.alpha == 0.5);
}

TEST_CASE("bump drift support and peak") {
  const DriftField b = make_bump_drift(0.75, 1.5);
  CHECK(std::abs(b(0.0, Vec{0.0})[0] - 0.75) < 1e-15);
  CHECK(b(0.0, Vec{1.5})[0] == 0.0);
  CHECK(b(0.0, Vec{-2.0})[0] == 0.0);
  CHECK(b(0.0, Vec{0.5})[0] > 0.0);
}

TEST_CASE("mollifier kernel mass, support, symmetry") {
  const MollifierKernel k(1, 0.1);
  CHECK(std::abs(k.mass_quadrature(128) - 1.0) < 1e-8);
  CHECK(k(Vec{0.25}) == 0.0);  // outside support radius 0.2
  CHECK(k(Vec{0.05}) > 0.0);
  CHECK(std::abs(k(Vec{0.12}) - k(Vec{-0.12})) < 1e-15);
  CHECK(std::abs(k.gradient(Vec{0.12})[0] + k.gradient(Vec{-0.12})[0]) < 1e-12);
  CHECK(k.gradient(Vec{0.0})[0] == 0.0);

  const MollifierKernel k2(2, 0.2);
  CHECK(std::abs(k2.mass_quadrature(128) - 1.0) < 1e-8);
}

TEST_CASE("mollification reproduces affine fields") {
  // symmetric unit-mass kernel: odd moments vanish, so affine fields are fixed points
  const MollifierKernel k(1, 0.1);
  const DriftField lin_eps = mollify(make_linear_drift(1.5), k);
  for (double x : {-0.8, 0.0, 0.33}) {
    CHECK(std::abs(lin_eps(0.0, Vec{x})[0] - 1.5 * x) < 1e-10);
    CHECK(std::abs(divergence(lin_eps, 0.0, Vec{x}) - 1.5) < 1e-8);
  }
  CHECK(lin_eps.has_jac());
}

TEST_CASE("mollified rough drift is close away from the kink") {
  const DriftField rough = make_sqrt_drift(+1);
  const DriftField smooth = mollify(rough, MollifierKernel(1, 0.05));
  // far from the origin the kernel sees a C^2 stretch of the field
  CHECK(std::abs(smooth(0.0, Vec{1.0})[0] - rough(0.0, Vec{1.0})[0]) < 5e-3);
  // divergence stays finite at the old singular point
  CHECK(std::isfinite(divergence(smooth, 0.0, Vec{0.0})));
}

TEST_CASE("holder seminorm scans") {
  std::vector<Vec> pts;
  for (double x : uniform_nodes(-1.0, 1.0, 81)) pts.push_back(Vec{x});

  const HolderReport h = estimate_holder_seminorm(
      [](double, const Vec& x) { return std::sqrt(std::abs(x[0])); }, 0.5, pts, {0.0});
  CHECK(std::abs(h.value - 1.0) < 1e-9);  // attained through the origin

  // field overload: worst pair of b = 2 sgn sqrt is (x, -x), ratio 2 sqrt(2)
  const HolderReport hf = estimate_holder_seminorm(make_sqrt_drift(+1), 0.5, pts, {0.0});
  CHECK(std::abs(hf.value - 2.0 * std::sqrt(2.0)) < 1e-9);
  CHECK(hf.points_used > 0);
}

TEST_CASE("checked evaluation rejects non-finite output") {
  DriftField f;
  f.dim = 1;
  f.eval = [](double, const Vec& x) { return Vec{1.0 / x[0]}; };
  CHECK_THROWS_AS((void)f(0.0, Vec{0.0}), NumericalError);
}
