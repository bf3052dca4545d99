#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "noiselab/errors.hpp"
#include "noiselab/quadrature.hpp"

using namespace noiselab;

TEST_CASE("gauss-legendre rule basics") {
  const GaussLegendre& gl = gauss_legendre(8);
  REQUIRE(gl.nodes.size() == 8);
  double wsum = 0.0;
  for (double w : gl.weights) wsum += w;
  CHECK(std::abs(wsum - 2.0) < 1e-13);  // integrates 1 over [-1,1]
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    CHECK(std::abs(gl.nodes[i] + gl.nodes[gl.nodes.size() - 1 - i]) < 1e-13);  // symmetric
}

TEST_CASE("gl_integrate is exact on polynomials up to degree 2n-1") {
  // order 5 handles degree 9 exactly: int_0^1 x^9 = 0.1
  const double v = gl_integrate(0.0, 1.0, 5, [](double x) { return std::pow(x, 9); });
  CHECK(std::abs(v - 0.1) < 1e-14);
  const double c = gl_integrate(0.0, std::acos(-1.0) / 2.0, 12, [](double x) { return std::cos(x); });
  CHECK(std::abs(c - 1.0) < 1e-13);
}

TEST_CASE("uniform nodes and trapezoid weights") {
  const std::vector<double> xs = uniform_nodes(-1.0, 3.0, 5);
  REQUIRE(xs.size() == 5);
  CHECK(xs.front() == -1.0);
  CHECK(xs.back() == 3.0);
  CHECK(std::abs(xs[1] - xs[0] - 1.0) < 1e-15);

  const std::vector<double> ws = trapezoid_weights(-1.0, 3.0, 5);
  REQUIRE(ws.size() == 5);
  double wsum = 0.0;
  for (double w : ws) wsum += w;
  CHECK(std::abs(wsum - 4.0) < 1e-13);
  CHECK(std::abs(ws.front() - 0.5) < 1e-15);
  CHECK(std::abs(ws[1] - 1.0) < 1e-15);

  // trapezoid on uniform nodes integrates affine functions exactly
  const std::vector<double> fine = uniform_nodes(0.0, 1.0, 101);
  const std::vector<double> fw = trapezoid_weights(0.0, 1.0, 101);
  double lin = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) lin += fw[i] * (2.0 * fine[i] + 1.0);
  CHECK(std::abs(lin - 2.0) < 1e-13);
}

TEST_CASE("cell centers") {
  const std::vector<double> cs = cell_centers(0.0, 1.0, 4);
  REQUIRE(cs.size() == 4);
  CHECK(std::abs(cs[0] - 0.125) < 1e-15);
  CHECK(std::abs(cs[3] - 0.875) < 1e-15);
}

TEST_CASE("tensor cell grid covers the box measure") {
  const CellGrid g = cell_grid(Box::cube(2, 1.0), 4);
  REQUIRE(g.points.size() == 16);
  CHECK(std::abs(g.weight * 16 - 4.0) < 1e-13);  // total measure of [-1,1]^2
  CHECK(std::abs(g.h - 0.5) < 1e-15);
  for (const Vec& p : g.points) CHECK(Box::cube(2, 1.0).contains(p));
}

TEST_CASE("ball-restricted grid stays in the ball") {
  const CellGrid g = cell_grid_ball(Vec{0.0, 0.0}, 1.0, 8);
  REQUIRE(!g.points.empty());
  CHECK(g.points.size() < 64);  // corners dropped
  for (const Vec& p : g.points) CHECK(p.norm() <= 1.0 + 1e-12);
}

TEST_CASE("for_each_tensor integrates a polynomial over a box") {
  const GaussLegendre& gl = gauss_legendre(6);
  double acc = 0.0;
  for_each_tensor(Box::cube(2, 1.0), gl.nodes, gl.weights,
                  [&](const Vec& x, double w) { acc += w * (x[0] * x[0] + x[1] * x[1]); });
  CHECK(std::abs(acc - 8.0 / 3.0) < 1e-12);
}
