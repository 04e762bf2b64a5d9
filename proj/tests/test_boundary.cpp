#include "doctest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "anisoag/boundary.hpp"

using namespace anisoag;

namespace {
// Perimeters of the ℓp unit circles (mpmath, 30 digits), as κ = 2π/L.
constexpr double kKappaL15 = 1.0578890300565282887;
constexpr double kKappaL3 = 0.93153323904817143671;
constexpr double kKappaL4 = 0.89533424745673478373;
}  // namespace

TEST_CASE("euclidean circle is its own arc-length parametrization") {
  const auto bp = BoundaryParam::trace(NormSpec::euclidean(), 1024);
  CHECK(bp.kappa() == doctest::Approx(1.0).epsilon(1e-13));
  for (double th : {0.0, 0.3, 1.7, 4.0, 6.1}) {
    const auto q = bp.query(th);
    CHECK(q.gamma.x == doctest::Approx(std::cos(th)).epsilon(1e-12));
    CHECK(q.gamma.y == doctest::Approx(std::sin(th)).epsilon(1e-12));
    CHECK(q.alpha == doctest::Approx(th + kPi / 2).epsilon(1e-12));
    CHECK(q.alpha_prime == doctest::Approx(1.0).epsilon(1e-5));
  }
  const auto q = bp.query(3 * kPi);
  CHECK(q.gamma.x == doctest::Approx(-1.0));
  CHECK(std::abs(q.gamma.y) < 1e-12);
  CHECK(q.tangent.y == doctest::Approx(-1.0));
  CHECK(q.alpha == doctest::Approx(3 * kPi + kPi / 2).epsilon(1e-12));
  CHECK_FALSE(bp.flatness_warning());
  CHECK(bp.inradius() == doctest::Approx(1.0));
}

TEST_CASE("lp perimeters match the quadrature oracle") {
  CHECK(BoundaryParam::trace(NormSpec::lp(4), 1024).kappa() == doctest::Approx(kKappaL4).epsilon(1e-12));
  CHECK(BoundaryParam::trace(NormSpec::lp(3), 256).kappa() == doctest::Approx(kKappaL3).epsilon(1e-12));
  CHECK(BoundaryParam::trace(NormSpec::lp(1.5), 256).kappa() == doctest::Approx(kKappaL15).epsilon(1e-10));
}

TEST_CASE("identity linear image matches euclidean and scaling maps to kappa") {
  const auto e = BoundaryParam::trace(NormSpec::euclidean(), 256);
  const auto l = BoundaryParam::trace(NormSpec::linear_image(Mat2{{{1, 0}, {0, 1}}}), 256);
  for (int j = 0; j < 256; ++j) {
    CHECK(dist(e.gamma_samples()[j], l.gamma_samples()[j]) < 1e-10);
    CHECK(std::abs(e.alpha_samples()[j] - l.alpha_samples()[j]) < 1e-10);
  }
  for (double s : {0.5, 2.0}) {
    const auto b = BoundaryParam::trace(NormSpec::linear_image(Mat2{{{s, 0}, {0, s}}}), 256);
    CHECK(b.kappa() == doctest::Approx(s).epsilon(1e-12));
    CHECK(dist(b.gamma(1.1), e.gamma(1.1)) < 1e-12);
  }
}

TEST_CASE("sample invariants hold for several norms") {
  for (const auto& n : {NormSpec::euclidean(), NormSpec::lp(1.5), NormSpec::lp(4), NormSpec::ellipse(2.0),
                        NormSpec::linear_image(Mat2{{{1, 0.4}, {0.1, 0.8}}})}) {
    const auto bp = BoundaryParam::trace(n, 512);
    const int N = bp.resolution();
    Vec2 closure{0, 0};
    double turning = 0;
    for (int j = 0; j < N; ++j) {
      CAPTURE(n.describe());
      CHECK(std::abs(bp.tangent_samples()[j].norm() - 1.0) < 1e-8);
      CHECK(std::abs(bp.norm(bp.gamma_samples()[j]) - 1.0) < 1e-12);
      CHECK(dot(rot90(bp.gamma_samples()[j]), bp.tangent_samples()[j]) >= bp.inradius());
      const Vec2 opposite = bp.gamma_samples()[(j + N / 2) % N];
      CHECK(dist(opposite, -bp.gamma_samples()[j]) < 1e-10);
      if (j + 1 < N) CHECK(bp.alpha_samples()[j + 1] >= bp.alpha_samples()[j]);
      closure += bp.tangent_samples()[j] * (kTwoPi / N);
      turning += bp.alpha_prime_samples()[j] * (kTwoPi / N);
    }
    CHECK(closure.norm() < 1e-8);
    CHECK(turning == doctest::Approx(kTwoPi).epsilon(1e-6));
    CHECK(bp.gamma_samples()[0].y == 0.0);
    CHECK(bp.gamma_samples()[0].x > 0.0);
    CHECK(bp.alpha_samples()[0] > 0.0);
    CHECK(bp.alpha_samples()[0] < kPi);
    CHECK(bp.alpha_linear(2.0 + kTwoPi) == doctest::Approx(bp.alpha_linear(2.0) + kTwoPi));
    CHECK(bp.alpha_linear(2.0 + kPi) == doctest::Approx(bp.alpha_linear(2.0) + kPi).epsilon(1e-8));
    // γ is differentiated consistently with its tangent
    for (double th : {0.2, 1.3, 2.9, 5.5}) {
      const double h = 1e-5;
      const Vec2 fd = (bp.gamma(th + h) - bp.gamma(th - h)) / (2 * h);
      CHECK(dist(fd, bp.tangent(th)) < 1e-7);
    }
  }
}

TEST_CASE("lp4 curvature density is flat at the axis and concentrated at the diagonal") {
  const auto bp = BoundaryParam::trace(NormSpec::lp(4), 1024);
  CHECK(bp.query(0.0).alpha_prime < 0.05);
  // α' at the diagonal is 3·2^{-1/4}/κ₄
  const double expected = 3.0 * std::pow(2.0, -0.25) / kKappaL4;
  const double coarse = bp.query(kPi / 4).alpha_prime;
  const double fine = BoundaryParam::trace(NormSpec::lp(4), 2048).query(kPi / 4).alpha_prime;
  CHECK(coarse == doctest::Approx(expected).epsilon(1e-3));
  // second-order difference density
  CHECK(std::abs(fine - expected) < 0.3 * std::abs(coarse - expected));
}

TEST_CASE("doubling the resolution refines gamma") {
  const auto a = BoundaryParam::trace(NormSpec::lp(3), 256);
  const auto b = BoundaryParam::trace(NormSpec::lp(3), 512);
  double sup = 0;
  for (int j = 0; j < 256; ++j) sup = std::max(sup, dist(a.gamma_samples()[j], b.gamma_samples()[2 * j]));
  CHECK(sup < 1e-10);
}

TEST_CASE("theta_of_point inverts gamma") {
  const auto e = BoundaryParam::trace(NormSpec::euclidean(), 256);
  CHECK(e.theta_of_point({0, 1}) == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(e.theta_of_point({1, 0}) == 0.0);
  CHECK_THROWS_AS(e.theta_of_point({0.5, 0}), std::invalid_argument);
  const auto bp = BoundaryParam::trace(NormSpec::lp(3), 1024);
  CHECK(bp.theta_of_point(bp.gamma(1.2345)) == doctest::Approx(1.2345).epsilon(1e-10));
  const auto l15 = BoundaryParam::trace(NormSpec::lp(1.5), 512);
  for (double th : {1e-4, 0.01, 0.7, 3.0, 6.2}) {
    CHECK(std::abs(l15.theta_of_point(l15.gamma(th)) - th) < 1e-8);
  }
}

TEST_CASE("dual norm and vortex") {
  const auto e = BoundaryParam::trace(NormSpec::euclidean(), 256);
  CHECK(e.dual_norm({3, 4}) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(e.dual_norm({0, 0}) == 0.0);
  CHECK(dist(e.vortex({0, 2}), {0, 1}) < 1e-10);
  CHECK(dist(e.vortex({1, 1}), {std::sqrt(0.5), std::sqrt(0.5)}) < 1e-10);
  CHECK_THROWS_AS(e.vortex({0, 0}), std::invalid_argument);

  const auto l3 = BoundaryParam::trace(NormSpec::lp(3), 1024);
  // rescaled dual of ℓ³ at (1,1) is κ₃·2^{2/3}
  CHECK(l3.dual_norm({1, 1}) == doctest::Approx(1.478716843608411571).epsilon(1e-12));
  CHECK(l3.dual_norm({2.5, 2.5}) == doctest::Approx(2.5 * 1.478716843608411571).epsilon(1e-12));

  const auto l4 = BoundaryParam::trace(NormSpec::lp(4), 1024);
  const Vec2 v = l4.vortex({1, 0});
  CHECK(v.x == doctest::Approx(kKappaL4).epsilon(1e-12));
  CHECK(std::abs(v.y) < 1e-9);
  CHECK(l4.norm(v) == doctest::Approx(1.0));
  const Vec2 w{0.3, -1.7};
  CHECK(dist(l4.vortex(-w), -l4.vortex(w)) < 1e-10);

  const auto ell = BoundaryParam::trace(NormSpec::ellipse(2.0), 512);
  const Vec2 w0{0.8, 0.45};
  const Vec2 dv{-0.3, 0.9};
  for (double h : {1e-3, 1e-4}) {
    const double diff = ell.dual_norm(w0 + dv * h) - ell.dual_norm(w0) - h * dot(dv, ell.vortex(w0));
    CHECK(std::abs(diff) < 5 * h * h);
  }
}

TEST_CASE("polar map") {
  const auto e = BoundaryParam::trace(NormSpec::euclidean(), 256);
  CHECK(dist(e.polar_map({0.3, -0.8}), {0.3, -0.8}) < 1e-12);
  CHECK(e.polar_map({0, 0}).norm() == 0.0);
  const auto l3 = BoundaryParam::trace(NormSpec::lp(3), 1024);
  const Vec2 z = unit_at(0.7) * 2.0;
  const Vec2 y = l3.polar_map(z);
  CHECK(dist(y, l3.gamma(0.7) * 2.0) < 1e-12);
  CHECK(l3.norm(y) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(dist(l3.polar_map_inverse(y), z) < 1e-8);
}

TEST_CASE("power-type exponent") {
  const auto e = power_type_estimate(BoundaryParam::trace(NormSpec::euclidean(), 256), 128);
  CHECK(e.exponent == doctest::Approx(2.0).epsilon(0.025));
  const auto l4 = power_type_estimate(BoundaryParam::trace(NormSpec::lp(4), 512), 128);
  CHECK(std::abs(l4.exponent - 4.0) < 0.2);
  const auto l15 = power_type_estimate(BoundaryParam::trace(NormSpec::lp(1.5), 512), 128);
  CHECK(std::abs(l15.exponent - 2.0) < 0.2);
  CHECK(l15.constant > 0.0);
  CHECK_THROWS_AS(power_type_estimate(BoundaryParam::trace(NormSpec::euclidean(), 64), 50),
                  std::invalid_argument);
}

TEST_CASE("csv export") {
  const auto bp = BoundaryParam::trace(NormSpec::euclidean(), 64);
  std::ostringstream os;
  bp.write_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("theta,gx,gy,gpx,gpy,alpha,alpha_prime\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 65);
}

TEST_CASE("bad resolution is rejected") {
  CHECK_THROWS_AS(BoundaryParam::trace(NormSpec::euclidean(), 10), std::invalid_argument);
}
