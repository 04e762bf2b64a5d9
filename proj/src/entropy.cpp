#include "anisoag/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "anisoag/errors.hpp"
#include "anisoag/quadrature.hpp"

namespace anisoag {

namespace {

double wrap_2pi(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double raw_bump(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp(-1.0 / (x * (1.0 - x)));
}

}  // namespace

double bump(double x) {
  static const double mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      raw_bump, 0.0, 1.0, 15, 1e-14);
  return raw_bump(x) / mass;
}

double cutoff(double r) {
  if (r <= 0.5 || r >= 2.0) return 0.0;
  if (r <= 1.0) {
    const double u = (r - 0.5) / 0.5;
    return u * u * (3.0 - 2.0 * u);
  }
  const double v = r - 1.0;
  return 1.0 - v * v * (3.0 - 2.0 * v);
}

double cutoff_derivative(double r) {
  if (r <= 0.5 || r >= 2.0) return 0.0;
  if (r <= 1.0) {
    const double u = (r - 0.5) / 0.5;
    return 2.0 * 6.0 * u * (1.0 - u);
  }
  const double v = r - 1.0;
  return -6.0 * v * (1.0 - v);
}

EntropyFn EntropyFn::accumulate(std::shared_ptr<const BoundaryParam> bp, std::vector<double> lambda) {
  if (!bp) throw std::invalid_argument("entropy needs a boundary");
  if (lambda.size() < 8) throw std::invalid_argument("entropy grid needs at least 8 nodes");
  EntropyFn e;
  e.bp_ = std::move(bp);
  e.lambda_ = std::move(lambda);
  e.rebuild();
  return e;
}

void EntropyFn::rebuild() {
  const int n = size();
  const double h = step();
  if (moment_a_.size() != lambda_.size()) {
    moment_a_.assign(n, {});
    moment_b_.assign(n, {});
    const auto& r = unit_gauss<7>();
    for (int j = 0; j < n; ++j) {
      Vec2 a{0, 0};
      Vec2 b{0, 0};
      for (std::size_t q = 0; q < r.x.size(); ++q) {
        const Vec2 t = bp_->tangent((j + r.x[q]) * h);
        a += t * (r.w[q] * (1.0 - r.x[q]));
        b += t * (r.w[q] * r.x[q]);
      }
      moment_a_[j] = a * h;
      moment_b_[j] = b * h;
    }
  }
  phi_.assign(n + 1, {});
  double scale = 1.0;
  lip_bound_ = 0.0;
  for (int j = 0; j < n; ++j) {
    const double l0 = lambda_[j];
    const double l1 = lambda_[(j + 1) % n];
    phi_[j + 1] = phi_[j] + moment_a_[j] * l0 + moment_b_[j] * l1;
    scale = std::max(scale, std::abs(l0));
    lip_bound_ = std::max(lip_bound_, std::abs(l1 - l0) / h);
  }
  admissible_ = (phi_[n] - phi_[0]).norm() <= 1e-8 * scale;
}

double EntropyFn::lambda(double theta) const {
  const int n = size();
  const double t = wrap_2pi(theta) / step();
  const int j = std::min(static_cast<int>(t), n - 1);
  const double u = t - j;
  return lambda_[j] * (1.0 - u) + lambda_[(j + 1) % n] * u;
}

Vec2 EntropyFn::phi(double theta) const {
  if (!admissible_) throw std::logic_error("phi_eval on a non-admissible entropy");
  const int n = size();
  const double h = step();
  const double t = wrap_2pi(theta);
  const int j = std::min(static_cast<int>(t / h), n - 1);
  const double a = j * h;
  if (t == a) return phi_[j];
  const double l0 = lambda_[j];
  const double l1 = lambda_[(j + 1) % n];
  const Vec2 partial = integrate_gauss<7>(
      [&](double s) { return bp_->tangent(s) * (l0 + (l1 - l0) * (s - a) / h); }, a, t);
  return phi_[j] + partial;
}

Vec2 EntropyFn::phi_at_point(Vec2 z) const { return phi(bp_->theta_of_point(z)); }

void EntropyFn::write_csv(std::ostream& os) const {
  os << "theta,lambda,phix,phiy\n";
  char buf[160];
  for (int j = 0; j < size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", j * step(), lambda_[j], phi_[j].x,
                  phi_[j].y);
    os << buf;
  }
}

EntropyFn project_to_admissible(std::shared_ptr<const BoundaryParam> bp, std::vector<double> lambda) {
  EntropyFn e = EntropyFn::accumulate(std::move(bp), std::move(lambda));
  const int n = e.size();
  std::vector<Vec2> g(n);
  for (int j = 0; j < n; ++j) g[j] = e.bp_->tangent(j * e.step());
  // W_j: the vector weight of node j in ∑ λ_j W_j = ∫ λ_h γ'
  double m11 = 0, m12 = 0, m21 = 0, m22 = 0;
  Vec2 rhs{0, 0};
  for (int j = 0; j < n; ++j) {
    const Vec2 w = e.moment_a_[j] + e.moment_b_[(j + n - 1) % n];
    m11 += g[j].x * w.x;
    m12 += g[j].y * w.x;
    m21 += g[j].x * w.y;
    m22 += g[j].y * w.y;
    rhs += w * e.lambda_[j];
  }
  const double det = m11 * m22 - m12 * m21;
  if (!(std::abs(det) > 1e-14)) throw NumericalError("admissibility Gram system is singular");
  const double c1 = (rhs.x * m22 - m12 * rhs.y) / det;
  const double c2 = (m11 * rhs.y - m21 * rhs.x) / det;
  for (int j = 0; j < n; ++j) e.lambda_[j] -= c1 * g[j].x + c2 * g[j].y;
  e.rebuild();
  const auto& tb = e.bp_->tangent_samples();
  double l1 = 0.0;
  for (const Vec2& t : tb) l1 += std::abs(c1 * t.x + c2 * t.y);
  e.correction_l1_ = l1 * kTwoPi / static_cast<double>(tb.size());
  if (!e.admissible_) throw NumericalError("admissibility projection failed to close Φ");
  return e;
}

std::vector<double> sample_lambda(const std::function<double(double)>& f, int n) {
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = f(kTwoPi * j / n);
  return out;
}

EntropyFn heaviside_entropy(std::shared_ptr<const BoundaryParam> bp, Vec2 xi, double delta, int n) {
  if (!(delta > 0.0 && delta < kPi / 4)) {
    throw std::invalid_argument("heaviside_entropy: delta must lie in (0, pi/4)");
  }
  const double th0 = bp->theta_of_point(xi);
  auto rho = [delta](double t) { return bump(wrap_2pi(t) / delta) / delta; };
  auto lam = sample_lambda([&](double th) { return rho(th - th0) + rho(kPi + th0 - th); }, n);
  return project_to_admissible(std::move(bp), std::move(lam));
}

Vec2 heaviside_limit(const BoundaryParam& bp, Vec2 xi, double theta) {
  const double th0 = bp.theta_of_point(xi);
  const double rel = wrap_2pi(theta - th0);
  if (rel > 0.0 && rel < kPi) return bp.tangent(th0);
  return {0.0, 0.0};
}

std::vector<HeavisideRow> heaviside_study(std::shared_ptr<const BoundaryParam> bp, Vec2 xi,
                                          const std::vector<double>& deltas, int n, int points,
                                          double margin, unsigned seed) {
  if (points < 1 || !(margin > 0.0 && margin < kPi / 2)) throw std::invalid_argument("heaviside_study: bad sampling options");
  const double th0 = bp->theta_of_point(xi);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(margin, kPi - margin);
  std::vector<double> thetas;
  for (int k = 0; k < points; ++k) thetas.push_back(th0 + U(rng) + (k % 2 ? kPi : 0.0));
  std::vector<HeavisideRow> rows;
  for (double d : deltas) {
    const EntropyFn e = heaviside_entropy(bp, xi, d, n);
    const Vec2 base = e.phi(th0);
    HeavisideRow r;
    r.delta = d;
    r.mu_l1 = e.correction_l1();
    for (double th : thetas) {
      r.max_error = std::max(r.max_error, dist(e.phi(th) - base, heaviside_limit(*bp, xi, th)));
    }
    rows.push_back(r);
  }
  return rows;
}

Vec2 phi_psi(const BoundaryParam& bp, const std::function<double(double)>& psi, double theta) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  auto fx = [&](double s) { return psi(s) * bp.tangent(s - kPi / 2).x; };
  auto fy = [&](double s) { return psi(s) * bp.tangent(s - kPi / 2).y; };
  // split into pieces short enough for a fixed rule on smooth boundaries
  Vec2 acc{0, 0};
  const int pieces = 16;
  const double a = theta - kPi / 2;
  const double w = kPi / pieces;
  for (int k = 0; k < pieces; ++k) {
    acc.x += GK::integrate(fx, a + k * w, a + (k + 1) * w, 6, 1e-12);
    acc.y += GK::integrate(fy, a + k * w, a + (k + 1) * w, 6, 1e-12);
  }
  return acc;
}

std::function<double(double)> lambda_of_psi(std::function<double(double)> psi) {
  return [psi = std::move(psi)](double th) { return psi(th + kPi / 2) + psi(th - kPi / 2); };
}

ExtendedEntropy::ExtendedEntropy(EntropyFn e) : e_(std::move(e)) {
  if (!e_.admissible()) throw std::invalid_argument("extension needs an admissible entropy");
}

ExtendedValue ExtendedEntropy::eval(Vec2 z) const {
  const BoundaryParam& bp = e_.boundary();
  const double r = bp.norm(z);
  if (r <= 0.5 || r >= 2.0) return {};
  const double th = bp.theta_of_direction(z);
  const Vec2 g = z / r;
  const Vec2 ph = e_.phi(th);
  const double eta = cutoff(r);
  ExtendedValue out;
  out.phi_hat = ph * eta;
  out.psi = g * (eta * e_.lambda(th) / (r * r)) - ph * (cutoff_derivative(r) / r);
  return out;
}

}  // namespace anisoag
