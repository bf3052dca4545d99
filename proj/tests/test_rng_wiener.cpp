#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "noiselab/errors.hpp"
#include "noiselab/rng.hpp"
#include "noiselab/wiener.hpp"

using namespace noiselab;

TEST_CASE("counter uniform is pure and lands in (0,1]") {
  const double a = counter_uniform(1, 2, 3, 0, 0);
  CHECK(a == counter_uniform(1, 2, 3, 0, 0));
  CHECK(a > 0.0);
  CHECK(a <= 1.0);
  CHECK(a != counter_uniform(1, 2, 3, 0, 1));  // stream decorrelates
  CHECK(a != counter_uniform(1, 2, 4, 0, 0));  // step decorrelates
}

TEST_CASE("counter gaussian moments") {
  const int n = 20000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = counter_gaussian(99, i, 0, 0);
    s += g;
    s2 += g * g;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
  CHECK(counter_gaussian(99, 7, 5, 1) == counter_gaussian(99, 7, 5, 1));
}

TEST_CASE("time grid arithmetic") {
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 4);
  REQUIRE(g.nodes() == 5);
  CHECK(g.steps() == 4);
  CHECK(g.t0() == 0.0);
  CHECK(g.t1() == 1.0);
  CHECK(std::abs(g.dt(1) - 0.25) < 1e-15);
  CHECK(g.index_of(0.5) == 2);
  CHECK_THROWS_AS((void)g.index_of(0.3), ValidationError);
}

TEST_CASE("wiener path regenerates bit-identically") {
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 50);
  const WienerPath a(2024, 3, g, 2);
  const WienerPath b(2024, 3, g, 2);
  for (int k = 0; k <= 50; ++k)
    for (int c = 0; c < 2; ++c) CHECK(a.value(k)[c] == b.value(k)[c]);
  CHECK(a.value(0).norm() == 0.0);

  // cumulative values are running sums of the increments
  Vec acc = Vec::zero(2);
  for (int k = 0; k < 50; ++k) {
    acc += a.increment(k);
    CHECK(std::abs(acc[0] - a.value(k + 1)[0]) < 1e-14);
  }
  const Vec between = a.increment_between(10, 20);
  CHECK(std::abs(between[0] - (a.value(20)[0] - a.value(10)[0])) < 1e-15);
}

TEST_CASE("distinct path indices decorrelate") {
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 10);
  const WienerPath a(5, 0, g, 1), b(5, 1, g, 1);
  CHECK(a.value(10)[0] != b.value(10)[0]);
}

TEST_CASE("coarsened view keeps the same realization") {
  const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 64);
  const WienerPath fine(7, 0, g, 1);
  const WienerPath coarse = fine.coarsened(4);
  REQUIRE(coarse.grid().steps() == 16);
  for (int k = 0; k <= 16; ++k) {
    CHECK(std::abs(coarse.grid().t[k] - fine.grid().t[4 * k]) < 1e-15);
    CHECK(std::abs(coarse.value(k)[0] - fine.value(4 * k)[0]) < 1e-12);
  }
}

TEST_CASE("zero path is identically zero") {
  const WienerPath z = WienerPath::zero(TimeGrid::uniform(0.0, 1.0, 8), 2);
  for (int k = 0; k <= 8; ++k) CHECK(z.value(k).norm() == 0.0);
}

TEST_CASE("terminal moments of the scaled endpoint") {
  const WienerMoments m = wiener_terminal_moments(4321, 20000, TimeGrid::uniform(0.0, 2.0, 4), 2);
  CHECK(m.paths == 20000);
  CHECK(std::abs(m.mean[0]) < 0.03);
  CHECK(std::abs(m.mean[1]) < 0.03);
  CHECK(std::abs(m.variance[0] - 1.0) < 0.05);
  CHECK(std::abs(m.cross_corr) < 0.03);
}
