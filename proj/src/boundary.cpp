#include "anisoag/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "anisoag/errors.hpp"

namespace anisoag {

namespace {

double wrap_2pi(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

int fine_count(int n) { return 2 * std::clamp(4 * n, 2048, 32768); }

// t in [0, 2π) → t − π on the second half, so γ(t) = −γ(t − π)
bool half_turn(double& t) {
  if (t < kPi) return false;
  t -= kPi;
  return true;
}

}  // namespace

BoundaryParam BoundaryParam::trace(const NormSpec& norm, int resolution) {
  if (resolution < 64) {
    throw std::invalid_argument("boundary resolution must be at least 64");
  }
  BoundaryParam bp;
  bp.norm_ = norm;
  bp.kappa_ = 1.0;

  const int m = fine_count(resolution);
  const double hphi = kTwoPi / m;
  bp.fine_phi_.resize(m + 1);
  bp.fine_arc_.resize(m + 1);
  bp.fine_arc_[0] = 0.0;
  auto sp = [&bp](double phi) { return bp.speed(phi); };
  for (int k = 0; k <= m; ++k) bp.fine_phi_[k] = k * hphi;
  const int half = m / 2;
  for (int k = 0; k < half; ++k) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0.0;
    double piece = GK::integrate(sp, bp.fine_phi_[k], bp.fine_phi_[k + 1], 0, 0.0, &err);
    if (err > 1e-10 * std::abs(piece)) {
      piece = GK::integrate(sp, bp.fine_phi_[k], bp.fine_phi_[k + 1], 15, 1e-10, &err);
    }
    if (!std::isfinite(piece) || !(piece > 0.0)) {
      throw NumericalError("boundary tracer failed: non-finite or vanishing arc length near phi=" +
                           std::to_string(bp.fine_phi_[k]));
    }
    bp.fine_arc_[k + 1] = bp.fine_arc_[k] + piece;
  }
  const double length = 2.0 * bp.fine_arc_[half];
  if (!std::isfinite(length) || !(length > 0.0)) {
    throw NumericalError("boundary tracer failed: perimeter is not finite");
  }
  bp.input_perimeter_ = length;
  bp.kappa_ = kTwoPi / length;
  for (int k = 0; k <= half; ++k) bp.fine_arc_[k] *= bp.kappa_;
  bp.fine_arc_[half] = kPi;
  for (int k = 1; k <= half; ++k) bp.fine_arc_[half + k] = bp.fine_arc_[k] + kPi;
  bp.fine_arc_[m] = kTwoPi;

  const int n = resolution;
  const double h = kTwoPi / n;
  bp.theta_.resize(n);
  bp.phi_.resize(n);
  bp.gamma_.resize(n);
  bp.tangent_.resize(n);
  bp.alpha_.resize(n);
  bp.alpha_prime_.resize(n);
  for (int j = 0; j < n; ++j) {
    const double th = j * h;
    bp.theta_[j] = th;
    if (n % 2 == 0 && j >= n / 2) {
      bp.phi_[j] = bp.phi_[j - n / 2] + kPi;
      bp.gamma_[j] = -bp.gamma_[j - n / 2];
      bp.tangent_[j] = -bp.tangent_[j - n / 2];
      continue;
    }
    const double phi = j == 0 ? 0.0 : bp.phi_of_arc(th);
    const Vec2 v = bp.curve_velocity(phi);
    bp.phi_[j] = phi;
    bp.gamma_[j] = bp.curve(phi);
    bp.tangent_[j] = v / v.norm();
  }

  bp.alpha_[0] = angle_of(bp.tangent_[0]);
  if (bp.alpha_[0] <= 0.0) bp.alpha_[0] += kTwoPi;
  for (int j = 1; j < n; ++j) {
    double step = angle_of(bp.tangent_[j]) - angle_of(bp.tangent_[j - 1]);
    step = std::remainder(step, kTwoPi);
    bp.alpha_[j] = bp.alpha_[j - 1] + step;
  }
  const double closing = bp.alpha_[0] + kTwoPi - bp.alpha_[n - 1];
  if (std::abs(std::remainder(closing - (bp.alpha_[n - 1] - bp.alpha_[n - 2]), kTwoPi)) > 1.0) {
    throw NumericalError("boundary tracer failed: tangent angle does not close up");
  }

  bp.min_alpha_increment_ = closing;
  for (int j = 0; j + 1 < n; ++j) {
    bp.min_alpha_increment_ = std::min(bp.min_alpha_increment_, bp.alpha_[j + 1] - bp.alpha_[j]);
  }
  if (bp.min_alpha_increment_ < -1e-9) {
    throw NumericalError("boundary tracer failed: tangent angle decreases (non-convex input)");
  }
  bp.flatness_warning_ = bp.min_alpha_increment_ <= 1e-12;

  for (int j = 0; j < n; ++j) {
    const double prev = j == 0 ? bp.alpha_[n - 1] - kTwoPi : bp.alpha_[j - 1];
    const double next = j == n - 1 ? bp.alpha_[0] + kTwoPi : bp.alpha_[j + 1];
    bp.alpha_prime_[j] = std::max(0.0, (next - prev) / (2.0 * h));
  }

  bp.inradius_ = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    bp.inradius_ = std::min(bp.inradius_, dot(rot90(bp.gamma_[j]), bp.tangent_[j]));
  }
  if (!(bp.inradius_ > 0.0)) {
    throw NumericalError("boundary tracer failed: curve is not star-shaped about the origin");
  }
  return bp;
}

double BoundaryParam::norm(Vec2 z) const { return norm_.value(z) / kappa_; }

Vec2 BoundaryParam::norm_gradient(Vec2 z) const { return norm_.gradient(z) / kappa_; }

double BoundaryParam::radius(double phi) const { return 1.0 / norm_.value(unit_at(phi)); }

Vec2 BoundaryParam::curve(double phi) const { return unit_at(phi) * (kappa_ * radius(phi)); }

Vec2 BoundaryParam::curve_velocity(double phi) const {
  const Vec2 e = unit_at(phi);
  const Vec2 ie = rot90(e);
  const double nv = norm_.value(e);
  const double rho = 1.0 / nv;
  const double drho = -dot(norm_.gradient(e), ie) * rho * rho;
  return (e * drho + ie * rho) * kappa_;
}

double BoundaryParam::speed(double phi) const { return curve_velocity(phi).norm(); }

double BoundaryParam::arc_from_node(std::size_t k, double phi) const {
  const double a = fine_phi_[k];
  if (phi == a) return fine_arc_[k];
  auto sp = [this](double p) { return speed(p); };
  return fine_arc_[k] + boost::math::quadrature::gauss<double, 10>::integrate(sp, a, phi);
}

double BoundaryParam::phi_of_arc(double s) const {
  const auto it = std::upper_bound(fine_arc_.begin(), fine_arc_.end(), s);
  std::size_t k = it == fine_arc_.begin() ? 0 : static_cast<std::size_t>(it - fine_arc_.begin()) - 1;
  k = std::min(k, fine_arc_.size() - 2);
  const double lo = fine_phi_[k];
  const double hi = fine_phi_[k + 1];
  const double frac = (s - fine_arc_[k]) / (fine_arc_[k + 1] - fine_arc_[k]);
  double phi = lo + frac * (hi - lo);
  for (int it_count = 0; it_count < 8; ++it_count) {
    const double f = arc_from_node(k, phi) - s;
    if (std::abs(f) < 1e-15) break;
    double next = phi - f / speed(phi);
    next = std::clamp(next, lo, hi);
    if (next == phi) break;
    phi = next;
  }
  return phi;
}

double BoundaryParam::arc_of_phi(double phi) const {
  const double h = fine_phi_[1] - fine_phi_[0];
  std::size_t k = static_cast<std::size_t>(std::floor(phi / h));
  k = std::min(k, fine_phi_.size() - 2);
  return arc_from_node(k, phi);
}

double BoundaryParam::alpha_near(Vec2 t, double reference) const {
  const double raw = angle_of(t);
  return raw + kTwoPi * std::round((reference - raw) / kTwoPi);
}

double BoundaryParam::alpha_linear(double theta) const {
  const int n = resolution();
  const double h = kTwoPi / n;
  const double turns = std::floor(theta / kTwoPi);
  const double t = theta - turns * kTwoPi;
  int j = static_cast<int>(std::floor(t / h));
  j = std::clamp(j, 0, n - 1);
  const double frac = (t - j * h) / h;
  const double a0 = alpha_[j];
  const double a1 = j + 1 < n ? alpha_[j + 1] : alpha_[0] + kTwoPi;
  return a0 + frac * (a1 - a0) + turns * kTwoPi;
}

double BoundaryParam::alpha_inverse(double a) const {
  const int n = resolution();
  const double h = kTwoPi / n;
  const double turns = std::floor((a - alpha_[0]) / kTwoPi);
  const double target = a - turns * kTwoPi;
  auto ext = [&](int j) { return j < n ? alpha_[j] : alpha_[0] + kTwoPi; };
  int lo = 0;
  int hi = n;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (ext(mid) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double a0 = ext(lo);
  const double a1 = ext(lo + 1);
  const double frac = a1 > a0 ? std::clamp((target - a0) / (a1 - a0), 0.0, 1.0) : 0.0;
  return (lo + frac) * h + turns * kTwoPi;
}

BoundaryPoint BoundaryParam::query(double theta) const {
  const int n = resolution();
  const double h = kTwoPi / n;
  const double t = wrap_2pi(theta);
  double r = t;
  const double sign = half_turn(r) ? -1.0 : 1.0;
  const double phi = phi_of_arc(r);
  const Vec2 v = curve_velocity(phi);
  BoundaryPoint out;
  out.gamma = curve(phi) * sign;
  out.tangent = v * (sign / v.norm());
  out.alpha = alpha_near(out.tangent, alpha_linear(theta));
  int j = std::clamp(static_cast<int>(std::floor(t / h)), 0, n - 1);
  const double frac = (t - j * h) / h;
  out.alpha_prime = alpha_prime_[j] * (1.0 - frac) + alpha_prime_[(j + 1) % n] * frac;
  return out;
}

Vec2 BoundaryParam::gamma(double theta) const {
  double t = wrap_2pi(theta);
  const double sign = half_turn(t) ? -1.0 : 1.0;
  return curve(phi_of_arc(t)) * sign;
}

Vec2 BoundaryParam::tangent(double theta) const {
  double t = wrap_2pi(theta);
  const double sign = half_turn(t) ? -1.0 : 1.0;
  const Vec2 v = curve_velocity(phi_of_arc(t));
  return v * (sign / v.norm());
}

double BoundaryParam::theta_of_direction(Vec2 z) const {
  const double phi = wrap_2pi(angle_of(z));
  return wrap_2pi(arc_of_phi(phi));
}

double BoundaryParam::theta_of_point(Vec2 z) const {
  const double r = norm(z);
  if (!std::isfinite(r) || std::abs(r - 1.0) > 1e-6) {
    throw std::invalid_argument("theta_of_point: point is not on the unit circle (norm " +
                                std::to_string(r) + ")");
  }
  return theta_of_direction(z);
}

double BoundaryParam::maximize_support(Vec2 w, double& phi_out) const {
  const int n = resolution();
  int best = 0;
  double best_val = dot(w, gamma_[0]);
  for (int j = 1; j < n; ++j) {
    const double v = dot(w, gamma_[j]);
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  const double mid = phi_[best];
  double lo = phi_[(best + n - 1) % n];
  double hi = phi_[(best + 1) % n];
  if (lo > mid) lo -= kTwoPi;
  if (hi < mid) hi += kTwoPi;

  auto g = [&](double phi) { return dot(w, curve_velocity(phi)); };
  const double glo = g(lo);
  const double ghi = g(hi);
  double phi_star = mid;
  if (glo >= 0.0 && ghi <= 0.0 && glo != ghi) {
    if (glo == 0.0) {
      phi_star = lo;
    } else if (ghi == 0.0) {
      phi_star = hi;
    } else {
      std::uintmax_t iters = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          g, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(52), iters);
      phi_star = 0.5 * (bracket.first + bracket.second);
    }
  } else {
    auto neg = [&](double phi) { return -dot(w, curve(phi)); };
    phi_star = boost::math::tools::brent_find_minima(neg, lo, hi, 52).first;
  }
  phi_out = phi_star;
  return std::max(best_val, dot(w, curve(phi_star)));
}

double BoundaryParam::dual_norm(Vec2 w) const {
  if (w.x == 0.0 && w.y == 0.0) return 0.0;
  double phi = 0.0;
  return maximize_support(w, phi);
}

Vec2 BoundaryParam::vortex(Vec2 x) const {
  if (x.x == 0.0 && x.y == 0.0) throw std::invalid_argument("vortex: x must be nonzero");
  double phi = 0.0;
  maximize_support(x, phi);
  return curve(phi);
}

Vec2 BoundaryParam::polar_map(Vec2 z) const {
  const double r = z.norm();
  if (r == 0.0) return {0.0, 0.0};
  return gamma(angle_of(z)) * r;
}

Vec2 BoundaryParam::polar_map_inverse(Vec2 y) const {
  const double r = norm(y);
  if (r == 0.0) return {0.0, 0.0};
  return unit_at(theta_of_direction(y)) * r;
}

void BoundaryParam::write_csv(std::ostream& os) const {
  os << "theta,gx,gy,gpx,gpy,alpha,alpha_prime\n";
  char buf[256];
  for (int j = 0; j < resolution(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", theta_[j],
                  gamma_[j].x, gamma_[j].y, tangent_[j].x, tangent_[j].y, alpha_[j],
                  alpha_prime_[j]);
    os << buf;
  }
}

PowerTypeEstimate power_type_estimate(const BoundaryParam& bp, int sample_count) {
  if (sample_count < 100) throw std::invalid_argument("power_type_estimate needs sample_count >= 100");
  PowerTypeEstimate est;
  for (int k = 2; k <= 7; ++k) {
    const double d = std::ldexp(1.0, -k);
    PowerTypeSample best{0.0, std::numeric_limits<double>::infinity()};
    for (int b = 0; b < sample_count; ++b) {
      const double c = kTwoPi * b / sample_count;
      const Vec2 x = bp.gamma(c - 0.5 * d);
      const Vec2 y = bp.gamma(c + 0.5 * d);
      const double gap = 1.0 - bp.norm((x + y) * 0.5);
      if (gap < best.gap) best = {bp.norm(x - y), gap};
    }
    if (best.gap > 0.0) est.samples.push_back(best);
  }
  if (est.samples.size() < 2) throw NumericalError("power_type_estimate: gaps vanish (flat boundary)");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(est.samples.size());
  for (const auto& s : est.samples) {
    const double lx = std::log(s.separation);
    const double ly = std::log(s.gap);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  est.exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  est.constant = std::exp((sy - est.exponent * sx) / cnt);
  return est;
}

}  // namespace anisoag
