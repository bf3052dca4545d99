#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <memory>

#include "doctest.h"
#include "noiselab/errors.hpp"
#include "noiselab/fields.hpp"
#include "noiselab/parabolic.hpp"

using namespace noiselab;

TEST_CASE("input validation") {
  const Box box = Box::interval(-1.0, 1.0);
  // CFL refusal: dtau sup|b| / h = 0.1 * 100 / 0.2 = 50
  CHECK_THROWS_AS((void)solve_backward_U(make_constant_drift(Vec{100.0}), 0.0, 1.0, box, 10, 1.0, 10),
                  NumericalError);
  // too coarse a grid
  CHECK_THROWS_AS((void)solve_backward_U(make_zero_drift(1), 0.0, 1.0, box, 3, 1.0, 10),
                  ValidationError);
  // anisotropic boxes are not marchable here
  Box aniso;
  aniso.lo = Vec{-1.0, -2.0};
  aniso.hi = Vec{1.0, 2.0};
  CHECK_THROWS_AS((void)solve_backward_U(make_zero_drift(2), 0.0, 1.0, aniso, 16, 1.0, 16),
                  ValidationError);
  // time-dependent drift needs per-step retabulation, which the marcher refuses
  DriftField td = make_zero_drift(1);
  td.time_dependent = true;
  CHECK_THROWS_AS((void)solve_backward_U(td, 0.0, 1.0, box, 16, 1.0, 16), ValidationError);
  // three dimensions are out of scope
  CHECK_THROWS_AS((void)solve_backward_U(make_zero_drift(3), 0.0, 1.0, Box::cube(3, 1.0), 8, 1.0, 8),
                  ValidationError);
}

TEST_CASE("constant drift gives the spatially flat closed form") {
  const double T = 1.0;
  const ParabolicSolution sol =
      solve_backward_U(make_constant_drift(Vec{1.0}), 0.0, 1.0, Box::interval(-2.0, 2.0), 16, T, 20);
  REQUIRE(sol.components == 1);
  REQUIRE(sol.nt == 20);
  for (int m = 0; m <= sol.nt; ++m) {
    const double exact = T - sol.t_at(m);
    for (int i = 0; i < sol.node_count(); ++i)
      CHECK(std::abs(sol.values[0][m][i] - exact) < 1e-10);
  }
  CHECK(sol.sup_grad_norm() < 1e-12);
  // interpolation between slices is linear in t
  const double mid = sol.U_at(0.125, Vec{0.3})[0];
  CHECK(std::abs(mid - (T - 0.125)) < 1e-10);
}

TEST_CASE("closed-form helpers for the transformed identity") {
  const Box valid = Box::cube(1, 10.0);
  const UFunction u0 = u_constant_field(Vec{2.0}, 0.0, 1.0, valid);
  CHECK(std::abs(u0.value(0.3, Vec{0.0})[0] - 2.0 * 0.7) < 1e-15);
  CHECK(u0.grad(0.3, Vec{0.0})(0, 0) == 0.0);

  const double lam = 2.0;
  const UFunction ul = u_constant_field(Vec{1.0}, lam, 1.0, valid);
  const double expect = (1.0 / lam) * (1.0 - std::exp(-lam * 0.7));
  CHECK(std::abs(ul.value(0.3, Vec{0.0})[0] - expect) < 1e-15);

  const UFunction z = u_zero(1, valid);
  CHECK(z.value(0.5, Vec{1.0})[0] == 0.0);

  CHECK_THROWS_AS((void)u_from_solution(nullptr), ValidationError);
}

TEST_CASE("lambda damping weakens the gradient") {
  const DriftField field = mollify(make_sqrt_drift(-1), MollifierKernel(1, 0.1));
  const Box box = Box::interval(-2.0, 2.0);
  const LambdaScanReport scan = lambda_scan(field, 1.0, box, 100, 1.0, 100, {1.0, 100.0}, 1);
  REQUIRE(scan.sup_grad.size() == 2);
  CHECK(scan.sup_grad[1] < scan.sup_grad[0]);
  CHECK(scan.monotone);
}

TEST_CASE("zero drift source makes a zero F") {
  const ParabolicSolution sol = solve_F_eps(make_zero_drift(1), Box::interval(-1.0, 1.0), 16, 0.5, 20);
  CHECK(sol.sup_norm() < 1e-14);
  const std::vector<double> w = w1p_norm_per_time(sol, 1.5);
  REQUIRE(w.size() == static_cast<std::size_t>(sol.nt) + 1);
  for (double v : w) CHECK(v < 1e-12);
}

TEST_CASE("gradient bound check reads the scan") {
  const ParabolicSolution sol =
      solve_backward_U(make_zero_drift(1), 1.0, 1.0, Box::interval(-2.0, 2.0), 32, 1.0, 40);
  const GradientBoundReport gb = gradient_bound_check(sol);
  CHECK(gb.pass);
  CHECK(gb.sup_grad < 1e-12);
  CHECK(gb.bound == 0.5);
}

TEST_CASE("transformed identity is exact when U solves the problem exactly") {
  // b = 0 and U = 0: the identity reduces to X = x0 + sigma W
  ZvonkinConfig cfg;
  cfg.n_paths = 50;
  cfg.seed = 909;
  cfg.grid = TimeGrid::uniform(0.0, 1.0, 100);
  cfg.x0 = Vec{0.2};
  const ZvonkinReport rep =
      zvonkin_residual(make_zero_drift(1), 0.0, 1.0, u_zero(1, Box::cube(1, 50.0)), cfg);
  CHECK(rep.paths_total == 50);
  CHECK(rep.paths_dropped == 0);
  CHECK(rep.max_residual < 1e-12);
}

TEST_CASE("paths leaving the validity box are dropped and counted") {
  ZvonkinConfig cfg;
  cfg.n_paths = 60;
  cfg.seed = 910;
  cfg.grid = TimeGrid::uniform(0.0, 1.0, 100);
  cfg.x0 = Vec{0.0};
  const ZvonkinReport rep =
      zvonkin_residual(make_zero_drift(1), 0.0, 1.0, u_zero(1, Box::cube(1, 0.5)), cfg);
  CHECK(rep.paths_dropped > 0);
  CHECK(rep.paths_total == 60);
}
