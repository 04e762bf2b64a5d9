#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "anisoag/norm.hpp"

using namespace anisoag;

TEST_CASE("builtin norms evaluate") {
  CHECK(NormSpec::euclidean().value({3, 4}) == doctest::Approx(5.0));
  CHECK(NormSpec::lp(3).value({1, 1}) == doctest::Approx(std::pow(2.0, 1.0 / 3.0)));
  CHECK(NormSpec::lp(4).value({-2, 0}) == doctest::Approx(2.0));
  CHECK(NormSpec::ellipse(2.0).value({2, 0}) == doctest::Approx(1.0));
  CHECK(NormSpec::linear_image(Mat2{{{2, 0}, {0, 1}}}).value({1, 1}) ==
        doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("lp norm survives extreme magnitudes") {
  const auto n = NormSpec::lp(8);
  CHECK(n.value({1e300, 1e300}) == doctest::Approx(1e300 * std::pow(2.0, 0.125)));
  CHECK(n.value({1e-300, 0}) == doctest::Approx(1e-300));
}

TEST_CASE("gradients match finite differences") {
  for (const auto& n : {NormSpec::euclidean(), NormSpec::lp(1.5), NormSpec::lp(4),
                        NormSpec::linear_image(Mat2{{{1, 0.3}, {-0.2, 2}}})}) {
    const Vec2 z{0.7, -0.4};
    const double h = 1e-6;
    const Vec2 g = n.gradient(z);
    CHECK(g.x == doctest::Approx((n.value({z.x + h, z.y}) - n.value({z.x - h, z.y})) / (2 * h)).epsilon(1e-7));
    CHECK(g.y == doctest::Approx((n.value({z.x, z.y + h}) - n.value({z.x, z.y - h})) / (2 * h)).epsilon(1e-7));
    CHECK_NOTHROW(validate_norm(n));
  }
}

TEST_CASE("custom norm without gradient uses central differences") {
  const auto n = NormSpec::custom([](Vec2 z) { return std::hypot(2 * z.x, z.y); });
  const Vec2 g = n.gradient({1, 0});
  CHECK(g.x == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(g.y == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("invalid norms are rejected") {
  CHECK_THROWS_AS(NormSpec::lp(1.0), std::invalid_argument);
  CHECK_THROWS_AS(NormSpec::linear_image(Mat2{{{1, 2}, {2, 4}}}), std::invalid_argument);
  const auto skew = NormSpec::custom([](Vec2 z) { return std::abs(z.x) + 2 * std::max(z.y, 0.0) + std::abs(z.y); });
  CHECK_THROWS_AS(validate_norm(skew), std::invalid_argument);
}

TEST_CASE("json and short-form round trips") {
  const auto a = NormSpec::from_json(nlohmann::json::parse(R"({"kind":"lp","p":4.0})"));
  CHECK(a.value({1, 1}) == doctest::Approx(std::pow(2.0, 0.25)));
  const auto b = NormSpec::from_json(nlohmann::json::parse(R"({"kind":"linear_image","A":[[2,0],[0,1]]})"));
  CHECK(b.value({1, 0}) == doctest::Approx(2.0));
  const auto c = NormSpec::from_json(NormSpec::parse("ellipse:3").to_json());
  CHECK(c.value({3, 0}) == doctest::Approx(1.0));
  CHECK(NormSpec::parse("linear:1,0,0,2").value({0, 1}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(NormSpec::parse("hexagon"), std::invalid_argument);
  CHECK_THROWS_AS(NormSpec::from_json(nlohmann::json::parse(R"({"kind":"lp"})")), std::invalid_argument);
}
