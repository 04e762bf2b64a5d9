#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "anisoag/costs.hpp"

using namespace anisoag;

namespace {
double euclid_delta_phi(double w, double delta) {
  const double c = std::min(w, delta);
  return 4.0 * (w - (w - c) * std::cos(c) - std::sin(c));
}
}  // namespace

TEST_CASE("jump pair geometry") {
  const auto bp = BoundaryParam::trace(NormSpec::lp(3), 1024);
  for (double tm : {0.1, 2.0, 4.4}) {
    for (double w : {0.05, 1.2, -0.7, 3.0}) {
      const JumpPair jp = make_jump_theta(bp, tm + w, tm);
      CHECK(std::abs(jp.nu.norm() - 1.0) < 1e-14);
      CHECK(std::abs(dot(jp.z_plus - jp.z_minus, jp.nu)) < 1e-13);
      CHECK(dot(jp.z_plus, rot90(jp.nu)) < dot(jp.z_minus, rot90(jp.nu)));
      CHECK(jp.width() == doctest::Approx(std::abs(w)).epsilon(1e-12));
      REQUIRE(jp.theta_tilde.has_value());
      CHECK(*jp.theta_tilde > jp.lo());
      CHECK(*jp.theta_tilde < jp.hi());
      CHECK(std::abs(dot(bp.tangent(*jp.theta_tilde), jp.nu)) < 1e-12);
    }
  }
  const JumpPair from_points = make_jump(bp, bp.gamma(1.0), bp.gamma(0.2));
  CHECK(from_points.theta_plus - from_points.theta_minus == doctest::Approx(0.8).epsilon(1e-9));
  CHECK_THROWS_AS(make_jump(bp, bp.gamma(1.0), bp.gamma(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(make_jump(bp, Vec2{2.0, 0.0}, bp.gamma(1.0)), std::invalid_argument);
  const JumpPair anti = make_jump_theta(bp, 0.3 + kPi, 0.3);
  CHECK(anti.antipodal);
  CHECK(std::abs(anti.a) < 1e-14);
  CHECK_FALSE(anti.theta_tilde.has_value());
}

TEST_CASE("euclidean closed forms") {
  const auto bp = BoundaryParam::trace(NormSpec::euclidean(), 1024);
  for (double half : {0.01, 0.3, 0.7}) {
    const JumpPair jp = make_jump_theta(bp, half, -half);
    const double chord = 2.0 * std::sin(half);
    CHECK(c1d(bp, jp) == doctest::Approx(chord * chord * chord / 3.0).epsilon(1e-9));
    const double cent = 2.0 * (std::sin(half) - half * std::cos(half));
    CHECK(cent_explicit(bp, jp) == doctest::Approx(cent).epsilon(1e-9));
    CHECK(cent_support_form(bp, jp) == doctest::Approx(cent).epsilon(1e-9));
    const double w = 2.0 * half;
    CHECK(pi_cost(bp, -half, half).value == doctest::Approx(w * w * w / 3.0).epsilon(1e-9));
    CHECK(pi_fast(bp, -half, half) == doctest::Approx(w * w * w / 3.0).epsilon(1e-9));
  }
  CHECK(cent_explicit(bp, make_jump_theta(bp, 0.3, -0.3)) == doctest::Approx(0.0178385198473155).epsilon(1e-9));
  CHECK(c1d(bp, make_jump_theta(bp, 1.0 + kPi, 1.0)) == doctest::Approx(8.0 / 3.0).epsilon(1e-9));
  CHECK_THROWS_AS(cent_explicit(bp, make_jump_theta(bp, 2.0, 0.0)), std::invalid_argument);
}

TEST_CASE("lp value matches the explicit formula") {
  for (const NormSpec& n : {NormSpec::euclidean(), NormSpec::lp(3), NormSpec::lp(1.5)}) {
    const auto bp = BoundaryParam::trace(n, 1024);
    for (double w : {0.6, 1.2}) {
      const JumpPair jp = make_jump_theta(bp, 0.4 + w, 0.4);
      const double ex = cent_explicit(bp, jp);
      const auto lp = cent_lp(bp, jp, 512);
      CHECK(lp.value == doctest::Approx(ex).epsilon(1e-3));
      CHECK(lp.lambda.size() == 512u);
    }
  }
}

TEST_CASE("antipodal lp value is positive and stable under refinement") {
  const auto bp = BoundaryParam::trace(NormSpec::lp(3), 1024);
  const JumpPair jp = make_jump_theta(bp, 0.2 + kPi, 0.2);
  const double v1 = cent_lp(bp, jp, 256).value;
  const double v2 = cent_lp(bp, jp, 512).value;
  CHECK(v1 > 0.0);
  CHECK(std::abs(v2 / v1 - 1.0) < 0.01);
  const double pi = pi_fast(bp, jp.theta_minus, jp.theta_plus);
  CHECK(v2 <= pi);
  CHECK_THROWS_AS(cent_lp(bp, jp, 64), std::invalid_argument);
}

TEST_CASE("pi estimators agree") {
  const auto bp = BoundaryParam::trace(NormSpec::lp(3), 1024);
  for (double w : {0.02, 0.5, 2.0, 3.1}) {
    const PiResult r = pi_cost(bp, 1.0, 1.0 + w);
    CHECK_FALSE(r.mismatch);
    CHECK(r.value == doctest::Approx(pi_fast(bp, 1.0, 1.0 + w)).epsilon(1e-5));
    CHECK(r.single == doctest::Approx(r.value).epsilon(1e-3));
  }
  // geodesic reduction and symmetry
  CHECK(pi_fast(bp, 0.5, 0.5 + 4.0) == doctest::Approx(pi_fast(bp, 0.5, 0.5 - (kTwoPi - 4.0))).epsilon(1e-12));
  CHECK(pi_fast(bp, 2.0, 1.0) == doctest::Approx(pi_fast(bp, 1.0, 2.0)).epsilon(1e-12));

  // flat stretch of the l4 ball around the axis carries less turning
  const auto b4 = BoundaryParam::trace(NormSpec::lp(4), 1024);
  const double w = 0.4;
  CHECK(pi_fast(b4, -w / 2, w / 2) < w * w * w / 3.0);
}

TEST_CASE("cost ordering on a grid") {
  const auto bp = BoundaryParam::trace(NormSpec::lp(3), 1024);
  for (double tm = 0.0; tm < kTwoPi; tm += 0.7) {
    for (double w : {0.01, 0.3, 1.0, 1.5}) {
      const JumpPair jp = make_jump_theta(bp, tm + w, tm);
      const double ce = cent_explicit(bp, jp);
      CHECK(ce <= pi_fast(bp, jp.theta_minus, jp.theta_plus) * (1.0 + 1e-9));
      CHECK(c1d(bp, jp) > 0.0);
    }
  }
}

TEST_CASE("small jump ratio") {
  for (const NormSpec& n : {NormSpec::euclidean(), NormSpec::lp(3), NormSpec::ellipse(2.0)}) {
    const auto bp = BoundaryParam::trace(n, 1024);
    for (double th : {0.3, 1.7, 4.0}) {
      const JumpPair jp = make_jump_theta(bp, th + 5e-4, th - 5e-4);
      const BoundaryPoint q = bp.query(th);
      const double support = std::abs(dot(rot90(q.tangent), q.gamma));
      CHECK(c1d(bp, jp) / cent_explicit(bp, jp) == doctest::Approx(4.0 / support).epsilon(1e-4));
    }
  }
}

TEST_CASE("delta phi on the circle") {
  const auto bp = BoundaryParam::trace(NormSpec::euclidean(), 1024);
  for (double delta : {0.1, 0.5}) {
    for (double w : {0.05, 0.3, 1.0}) {
      const double got = delta_phi(bp, unit_at(0.4), unit_at(0.4 + w), delta);
      CHECK(got == doctest::Approx(euclid_delta_phi(w, delta)).epsilon(1e-8));
      CHECK(delta_phi(bp, unit_at(0.4 + w), unit_at(0.4), delta) == doctest::Approx(got).epsilon(1e-10));
    }
  }
  CHECK(delta_phi(bp, unit_at(1.0), unit_at(1.0), 0.2) == 0.0);
  CHECK_THROWS_AS(delta_phi(bp, unit_at(0.0), unit_at(1.0), 2.0), std::invalid_argument);
}

TEST_CASE("modulus of the inverse turning angle") {
  const auto e = BoundaryParam::trace(NormSpec::euclidean(), 1024);
  for (double d : {0.01, 0.2, 1.0}) {
    CHECK(omega_modulus(e, d) == doctest::Approx(d).epsilon(1e-10));
    CHECK(omega_inverse(e, d) == doctest::Approx(d).epsilon(1e-10));
  }
  const double w = 0.01;
  CHECK(modulus_ratio(e, unit_at(0.3), unit_at(0.3 + w)) == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  CHECK(check_modulus_bound(e, unit_at(0.3), unit_at(0.3 + w), 0.6));
  CHECK_FALSE(check_modulus_bound(e, unit_at(0.3), unit_at(0.3 + w), 0.7));

  const auto b4 = BoundaryParam::trace(NormSpec::lp(4), 1024);
  for (double d : {0.05, 0.3}) {
    CHECK(omega_modulus(b4, d) > d * 1.01);
    CHECK(omega_modulus(b4, omega_inverse(b4, d)) == doctest::Approx(d).epsilon(1e-9));
  }
}

TEST_CASE("bounds scan") {
  const auto bp = BoundaryParam::trace(NormSpec::lp(3), 1024);
  BoundsOptions opt;
  opt.base_points = 8;
  opt.widths = 8;
  opt.lp_nodes = 256;
  opt.limit_points = 6;
  const BoundsReport r = verify_bounds(bp, opt);
  CHECK(r.pairs.size() == 64u);
  CHECK(r.cent_pi_violations == 0);
  CHECK(r.limit_match == "4");
  CHECK(r.limit_err_4 < 1e-3);
  CHECK(std::isfinite(r.ratio_sup));
  CHECK(r.ratio_inf > 0.0);
  opt.widths = 1;
  CHECK_THROWS_AS(verify_bounds(bp, opt), std::invalid_argument);
}
