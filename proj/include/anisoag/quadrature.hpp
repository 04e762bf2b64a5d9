#pragma once
/**
 * @file quadrature.hpp
 * @brief Fixed Gauss–Legendre rules on [0, 1] for vector-valued integrands.
 */

#include <array>
#include <cstddef>

#include <boost/math/quadrature/gauss.hpp>

namespace anisoag {

template <std::size_t N>
struct UnitRule {
  std::array<double, N> x{};
  std::array<double, N> w{};
};

/// N-point Gauss–Legendre nodes and weights on [0, 1].
template <std::size_t N>
const UnitRule<N>& unit_gauss() {
  static const UnitRule<N> rule = [] {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    UnitRule<N> r;
    std::size_t k = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) {
        r.x[k] = 0.5;
        r.w[k++] = 0.5 * w[i];
        continue;
      }
      r.x[k] = 0.5 - 0.5 * a[i];
      r.w[k++] = 0.5 * w[i];
      r.x[k] = 0.5 + 0.5 * a[i];
      r.w[k++] = 0.5 * w[i];
    }
    return r;
  }();
  return rule;
}

/// ∫_a^b f for any f whose result supports + and scalar *.
template <std::size_t N, class F>
auto integrate_gauss(F&& f, double a, double b) {
  const auto& r = unit_gauss<N>();
  const double h = b - a;
  auto acc = f(a + r.x[0] * h) * r.w[0];
  for (std::size_t i = 1; i < N; ++i) acc = acc + f(a + r.x[i] * h) * r.w[i];
  return acc * h;
}

}  // namespace anisoag
