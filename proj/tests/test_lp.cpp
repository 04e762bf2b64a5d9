#include "doctest.h"

#include <cmath>

#include "anisoag/lp.hpp"

using namespace anisoag;

TEST_CASE("box constrained lp with one equality") {
  // max x + 2y  s.t. x + y = 1, 0 <= x, y <= 0.8
  BoundedLp lp;
  lp.rows = 1;
  lp.cols = 2;
  lp.a = {1.0, 1.0};
  lp.b = {1.0};
  lp.c = {1.0, 2.0};
  lp.lower = {0.0, 0.0};
  lp.upper = {0.8, 0.8};
  const auto s = solve_bounded_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(s.x[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(s.x[1] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(s.primal_residual < 1e-12);
}

TEST_CASE("infeasible lp is reported") {
  BoundedLp lp;
  lp.rows = 1;
  lp.cols = 2;
  lp.a = {1.0, 1.0};
  lp.b = {3.0};
  lp.c = {1.0, 1.0};
  lp.lower = {-1.0, -1.0};
  lp.upper = {1.0, 1.0};
  CHECK(solve_bounded_lp(lp).status == LpStatus::infeasible);
}

TEST_CASE("l1 fit dual matches brute force") {
  // max c·d, |d_j| <= 1, sum d = 0 equals min_y sum |c_j - y|
  const std::vector<double> c = {3.0, -1.0, 0.5, 2.0, -4.0, 1.5, 0.0};
  BoundedLp lp;
  lp.rows = 1;
  lp.cols = static_cast<int>(c.size());
  lp.a.assign(c.size(), 1.0);
  lp.b = {0.0};
  lp.c = c;
  lp.lower.assign(c.size(), -1.0);
  lp.upper.assign(c.size(), 1.0);
  const auto s = solve_bounded_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  double best = 1e300;
  for (double y : c) {
    double acc = 0.0;
    for (double v : c) acc += std::abs(v - y);
    best = std::min(best, acc);
  }
  CHECK(s.objective == doctest::Approx(best).epsilon(1e-12));
}
