#include "anisoag/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "anisoag/errors.hpp"
#include "anisoag/lp.hpp"
#include "anisoag/parallel.hpp"
#include "anisoag/quadrature.hpp"

namespace anisoag {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;

double integrate_1d(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  double v = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * l1;
  if (err > 1e-9 * std::abs(v) + floor) v = GK::integrate(f, a, b, 6, 1e-9, &err);
  return v;
}

// Simpson's rule: exact for quadratics.
template <class F>
double simpson(F&& f, double a, double b) {
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

}  // namespace

JumpPair make_jump_theta(const BoundaryParam& bp, double theta_plus, double theta_minus) {
  double d = std::remainder(theta_plus - theta_minus, kTwoPi);
  if (std::abs(d) < 1e-14) throw std::invalid_argument("make_jump: z+ and z- coincide");
  JumpPair jp;
  jp.antipodal = std::abs(std::abs(d) - kPi) < 1e-12;
  if (jp.antipodal) d = kPi;
  jp.theta_minus = theta_minus;
  jp.theta_plus = theta_minus + d;
  jp.z_minus = bp.gamma(jp.theta_minus);
  jp.z_plus = jp.antipodal ? -jp.z_minus : bp.gamma(jp.theta_plus);
  const Vec2 diff = jp.z_plus - jp.z_minus;
  jp.nu = rot90(diff) / diff.norm();
  jp.a = 0.5 * (dot(jp.z_plus, jp.nu) + dot(jp.z_minus, jp.nu));
  if (!jp.antipodal) {
    const double lo = jp.lo();
    const double hi = jp.hi();
    auto f = [&](double t) { return dot(bp.tangent(t), jp.nu); };
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) {
      jp.theta_tilde = lo;
    } else if (fhi == 0.0) {
      jp.theta_tilde = hi;
    } else if ((flo < 0) != (fhi < 0)) {
      std::uintmax_t iters = 100;
      const auto r = boost::math::tools::toms748_solve(
          f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iters);
      jp.theta_tilde = 0.5 * (r.first + r.second);
    } else {
      throw NumericalError("make_jump: tangent does not cross the jump normal (flat boundary?)");
    }
  }
  return jp;
}

JumpPair make_jump(const BoundaryParam& bp, Vec2 z_plus, Vec2 z_minus) {
  if (dist(z_plus, z_minus) < 1e-14) throw std::invalid_argument("make_jump: z+ and z- coincide");
  const double tm = bp.theta_of_point(z_minus);
  const double tp = bp.theta_of_point(z_plus);
  return make_jump_theta(bp, tp, tm);
}

double c1d(const BoundaryParam& bp, const JumpPair& jp) {
  const Vec2 inu = rot90(jp.nu);
  const double s0 = dot(jp.z_minus, inu);
  const double s1 = dot(jp.z_plus, inu);
  auto f = [&](double s) {
    const double r = bp.norm(jp.nu * jp.a + inu * s);
    return 1.0 - r * r;
  };
  return 2.0 * std::abs(integrate_1d(f, s0, s1));
}

double cent_explicit(const BoundaryParam& bp, const JumpPair& jp) {
  if (jp.width() >= kPi / 2) {
    throw std::invalid_argument("cent_explicit: jump width >= pi/2, use cent_lp");
  }
  const double tt = *jp.theta_tilde;
  auto f = [&](double t) { return (t - tt) * dot(bp.tangent(t), jp.nu); };
  return std::abs(integrate_1d(f, jp.lo(), tt) + integrate_1d(f, tt, jp.hi()));
}

double cent_support_form(const BoundaryParam& bp, const JumpPair& jp) {
  auto f = [&](double t) { return jp.a - dot(bp.gamma(t), jp.nu); };
  const double mid = jp.theta_tilde ? *jp.theta_tilde : 0.5 * (jp.lo() + jp.hi());
  return std::abs(integrate_1d(f, jp.lo(), mid) + integrate_1d(f, mid, jp.hi()));
}

CentLpResult cent_lp(const BoundaryParam& bp, const JumpPair& jp, int n) {
  if (n < 128) throw std::invalid_argument("cent_lp: grid size must be at least 128");
  const double h = kTwoPi / n;
  std::vector<Vec2> tan(n);
  for (int k = 0; k < n; ++k) tan[k] = bp.tangent(k * h);
  auto node = [n](long j) { return static_cast<int>(((j % n) + n) % n); };

  // W_k = ∫_window φ_k g_h, P_k = ∫_window φ_k
  std::vector<double> W(n, 0.0);
  std::vector<double> P(n, 0.0);
  const double lo = jp.lo();
  const double hi = jp.hi();
  double G = 0.0;
  for (long j = static_cast<long>(std::floor(lo / h)); j * h < hi; ++j) {
    const double c0 = j * h;
    const double p = std::max(lo, c0);
    const double q = std::min(hi, c0 + h);
    if (q <= p) continue;
    const int k0 = node(j);
    const int k1 = node(j + 1);
    auto u = [&](double t) { return (t - c0) / h; };
    auto gx = [&](double t) { return dot(bp.tangent(t), jp.nu); };
    W[k0] += integrate_gauss<4>([&](double t) { return (1.0 - u(t)) * gx(t); }, p, q);
    W[k1] += integrate_gauss<4>([&](double t) { return u(t) * gx(t); }, p, q);
    P[k0] += simpson([&](double t) { return 1.0 - u(t); }, p, q);
    P[k1] += simpson([&](double t) { return u(t); }, p, q);
    G += integrate_gauss<4>(gx, p, q);
  }
  // ∫_window g = (z⁺ − z⁻)·ν = 0; remove the discretization residue so constants cost nothing
  const double shift = G / (hi - lo);
  for (int k = 0; k < n; ++k) W[k] -= shift * P[k];

  // variables d_j = λ_{j+1} − λ_j, λ_0 = 0
  BoundedLp lp;
  lp.rows = 3;
  lp.cols = n;
  lp.a.assign(static_cast<std::size_t>(3) * n, 0.0);
  lp.b.assign(3, 0.0);
  lp.c.assign(n, 0.0);
  lp.lower.assign(n, -h);
  lp.upper.assign(n, h);
  double wsum = 0.0;
  Vec2 vsum{0, 0};
  for (int j = n - 1; j >= 0; --j) {
    // suffix sums over k > j
    lp.c[j] = wsum;
    lp.at(0, j) = 1.0;
    lp.at(1, j) = vsum.x;
    lp.at(2, j) = vsum.y;
    wsum += W[j];
    const Vec2 v = (tan[node(j - 1)] + tan[j] * 4.0 + tan[node(j + 1)]) * (h / 6.0);
    vsum += v;
  }
  const LpSolution sol = solve_bounded_lp(lp);
  if (sol.status != LpStatus::optimal) {
    throw NumericalError("cent_lp: solver did not converge (" + sol.diagnostics + ")");
  }
  CentLpResult out;
  out.value = std::max(0.0, sol.objective);
  out.iterations = sol.iterations;
  out.lambda.assign(n, 0.0);
  for (int k = 1; k < n; ++k) out.lambda[k] = out.lambda[k - 1] + sol.x[k - 1];
  return out;
}

namespace {

void geodesic_window(double t1, double t2, double& lo, double& hi) {
  const double d = std::remainder(t2 - t1, kTwoPi);
  lo = std::min(t1, t1 + d);
  hi = std::max(t1, t1 + d);
}

double midpoint_pi(const BoundaryParam& bp, double lo, double hi, int m) {
  const double w = (hi - lo) / m;
  std::vector<double> al(m);
  for (int i = 0; i < m; ++i) al[i] = bp.alpha_linear(lo + (i + 0.5) * w);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int k = i + 1; k < m; ++k) acc += std::abs(al[k] - al[i]);
  }
  return 2.0 * acc * w * w;
}

// Splits [lo, hi] at the nodes of the boundary grid and applies f(p, q) per piece.
template <class F>
double per_cell(const BoundaryParam& bp, double lo, double hi, F&& f) {
  const double h = kTwoPi / bp.resolution();
  double acc = 0.0;
  for (long j = static_cast<long>(std::floor(lo / h)); j * h < hi; ++j) {
    const double p = std::max(lo, j * h);
    const double q = std::min(hi, (j + 1) * h);
    if (q > p) acc += f(p, q);
  }
  return acc;
}

}  // namespace

PiResult pi_cost(const BoundaryParam& bp, double theta1, double theta2) {
  double lo = 0.0;
  double hi = 0.0;
  geodesic_window(theta1, theta2, lo, hi);
  PiResult r;
  if (hi - lo <= 0.0) return r;
  const double q1 = midpoint_pi(bp, lo, hi, 128);
  const double q2 = midpoint_pi(bp, lo, hi, 256);
  r.value = std::max(0.0, (4.0 * q2 - q1) / 3.0);
  const int n = bp.resolution();
  const double h = kTwoPi / n;
  const auto& ap = bp.alpha_prime_samples();
  auto density = [&](double t) {
    const double s = t - kTwoPi * std::floor(t / kTwoPi);
    const int j = std::min(static_cast<int>(s / h), n - 1);
    const double u = s / h - j;
    return ap[j] * (1.0 - u) + ap[(j + 1) % n] * u;
  };
  r.single = 2.0 * per_cell(bp, lo, hi, [&](double p, double q) {
    return integrate_gauss<3>([&](double t) { return (t - lo) * (hi - t) * density(t); }, p, q);
  });
  const double scale = std::max(r.value, r.single);
  r.mismatch = scale > 0.0 && std::abs(r.value - r.single) > 0.01 * scale;
  return r;
}

double pi_fast(const BoundaryParam& bp, double theta1, double theta2) {
  double lo = 0.0;
  double hi = 0.0;
  geodesic_window(theta1, theta2, lo, hi);
  if (hi - lo <= 0.0) return 0.0;
  const double s = lo + hi;
  return 2.0 * per_cell(bp, lo, hi, [&](double p, double q) {
    return simpson([&](double t) { return bp.alpha_linear(t) * (2.0 * t - s); }, p, q);
  });
}

double lambda_circle(const BoundaryParam& bp, Vec2 m1, Vec2 m2) {
  return pi_fast(bp, angle_of(m1), angle_of(m2));
}

double delta_phi(const BoundaryParam& bp, Vec2 m1, Vec2 m2, double delta) {
  if (!(delta > 0.0 && delta < kPi / 2)) throw std::invalid_argument("delta_phi: delta must lie in (0, pi/2)");
  const double t1 = angle_of(m1);
  const double t2 = angle_of(m2);
  const double d = std::remainder(t2 - t1, kTwoPi);
  if (std::abs(d) < 1e-15) return 0.0;
  struct Arc {
    double a, b, sign;
  };
  Arc A = d > 0 ? Arc{t1 + kPi / 2, t2 + kPi / 2, 1.0} : Arc{t2 - kPi / 2, t1 - kPi / 2, 1.0};
  if (d > 0) A.b = A.a + d;
  else A.a = A.b + d;
  const Arc arcs[2] = {A, Arc{A.a + kPi, A.b + kPi, -1.0}};

  auto kernel = [&](double s, double t) {
    return std::abs(std::sin(bp.alpha_linear(t - kPi / 2) - bp.alpha_linear(s - kPi / 2)));
  };
  auto inner = [&](double s, const Arc& b) {
    double acc = 0.0;
    for (int k = -1; k <= 1; ++k) {
      const double off = k * kTwoPi;
      const double p = std::max(b.a, s - delta + off);
      const double q = std::min(b.b, s + delta + off);
      if (q <= p) continue;
      const double c = s + off;
      auto f = [&](double t) { return kernel(s, t); };
      if (c > p && c < q) {
        acc += integrate_gauss<8>(f, p, c) + integrate_gauss<8>(f, c, q);
      } else {
        acc += integrate_gauss<8>(f, p, q);
      }
    }
    return acc;
  };
  double total = 0.0;
  for (const Arc& a : arcs) {
    for (const Arc& b : arcs) {
      // the inner integral has kinks where the window s ± δ meets an end of b
      std::vector<double> cuts = {a.a, a.b};
      for (int k = -1; k <= 1; ++k) {
        for (double e : {b.a, b.b}) {
          for (double c : {e - delta + k * kTwoPi, e + delta + k * kTwoPi}) {
            if (c > a.a && c < a.b) cuts.push_back(c);
          }
        }
      }
      std::sort(cuts.begin(), cuts.end());
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0.0) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil(len / 0.02)));
        const double pw = len / panels;
        for (int p = 0; p < panels; ++p) {
          const double s0 = cuts[i] + p * pw;
          acc += integrate_gauss<8>([&](double s) { return inner(s, b); }, s0, s0 + pw);
        }
      }
      total += a.sign * b.sign * acc;
    }
  }
  return total;
}

double omega_modulus(const BoundaryParam& bp, double delta) {
  if (!(delta > 0.0)) return 0.0;
  const auto& al = bp.alpha_samples();
  double best = 0.0;
  for (double a : al) {
    for (double t : {a, a - delta}) {
      best = std::max(best, bp.alpha_inverse(t + delta) - bp.alpha_inverse(t));
    }
  }
  return best;
}

double omega_inverse(const BoundaryParam& bp, double y) {
  if (!(y > 0.0)) return 0.0;
  double lo = 0.0;
  double hi = y;
  while (omega_modulus(bp, hi) < y) hi *= 2.0;
  for (int it = 0; it < 60 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (omega_modulus(bp, mid) >= y) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double modulus_ratio(const BoundaryParam& bp, Vec2 m1, Vec2 m2) {
  const double d = dist(m1, m2);
  if (d == 0.0) return std::numeric_limits<double>::infinity();
  return lambda_circle(bp, m1, m2) / (d * d * omega_inverse(bp, 0.5 * d));
}

bool check_modulus_bound(const BoundaryParam& bp, Vec2 m1, Vec2 m2, double c) {
  const double d = dist(m1, m2);
  return lambda_circle(bp, m1, m2) >= c * d * d * omega_inverse(bp, 0.5 * d);
}

CostReport cost_report(const BoundaryParam& bp, const JumpPair& jp, int lp_nodes) {
  CostReport r;
  r.c1d = c1d(bp, jp);
  if (jp.width() < kPi / 2) r.cent_explicit = cent_explicit(bp, jp);
  if (lp_nodes > 0) r.cent_lp = cent_lp(bp, jp, lp_nodes).value;
  r.cent = r.cent_explicit ? *r.cent_explicit : r.cent_lp;
  const PiResult pi = pi_cost(bp, jp.theta_minus, jp.theta_plus);
  r.pi = pi.value;
  r.pi_mismatch = pi.mismatch;
  r.ratio_c1d_cent = r.cent > 0.0 ? r.c1d / r.cent : 0.0;
  r.ratio_cent_pi = r.pi > 0.0 ? r.cent / r.pi : 0.0;
  return r;
}

nlohmann::json to_json(const CostReport& r) {
  nlohmann::json j;
  j["c1d"] = r.c1d;
  j["cent_explicit"] = r.cent_explicit ? nlohmann::json(*r.cent_explicit) : nlohmann::json(nullptr);
  j["cent_lp"] = r.cent_lp;
  j["cent"] = r.cent;
  j["pi"] = r.pi;
  j["pi_mismatch"] = r.pi_mismatch;
  j["ratio_c1d_cent"] = r.ratio_c1d_cent;
  j["ratio_cent_pi"] = r.ratio_cent_pi;
  return j;
}

BoundsReport verify_bounds(const BoundaryParam& bp, const BoundsOptions& opt) {
  if (opt.base_points < 1 || opt.widths < 2 || !(opt.min_width > 0.0) ||
      !(opt.max_width > opt.min_width) || opt.max_width > kPi) {
    throw std::invalid_argument("verify_bounds: invalid grid options");
  }
  BoundsReport rep;
  const std::size_t total = static_cast<std::size_t>(opt.base_points) * opt.widths;
  rep.pairs.resize(total);
  const double lw0 = std::log(opt.min_width);
  const double lw1 = std::log(opt.max_width);
  parallel_for(total, opt.jobs, [&](std::size_t idx) {
    const int b = static_cast<int>(idx / opt.widths);
    const int k = static_cast<int>(idx % opt.widths);
    double w = std::exp(lw0 + (lw1 - lw0) * k / (opt.widths - 1));
    if (k == opt.widths - 1) w = opt.max_width;
    const double tm = kTwoPi * b / opt.base_points;
    const JumpPair jp = make_jump_theta(bp, tm + w, tm);
    PairCosts& pc = rep.pairs[idx];
    pc.theta_minus = jp.theta_minus;
    pc.theta_plus = jp.theta_plus;
    pc.c1d = c1d(bp, jp);
    pc.cent = jp.width() < kPi / 2 ? cent_explicit(bp, jp) : cent_lp(bp, jp, opt.lp_nodes).value;
    pc.pi = pi_fast(bp, jp.theta_minus, jp.theta_plus);
    pc.ratio = pc.cent > 0.0 ? pc.c1d / pc.cent : std::numeric_limits<double>::infinity();
  });
  rep.ratio_sup = 0.0;
  rep.ratio_inf = std::numeric_limits<double>::infinity();
  for (const auto& pc : rep.pairs) {
    rep.ratio_sup = std::max(rep.ratio_sup, pc.ratio);
    rep.ratio_inf = std::min(rep.ratio_inf, pc.ratio);
    if (pc.cent > pc.pi * (1.0 + 1e-6) + 1e-14) ++rep.cent_pi_violations;
    if (pc.pi > 0.0) rep.cent_pi_max_ratio = std::max(rep.cent_pi_max_ratio, pc.cent / pc.pi);
  }
  for (int i = 0; i < opt.limit_points; ++i) {
    const double th = kTwoPi * (i + 0.25) / opt.limit_points;
    const JumpPair jp = make_jump_theta(bp, th + 0.5 * opt.limit_width, th - 0.5 * opt.limit_width);
    const BoundaryPoint q = bp.query(th);
    const double support = std::abs(dot(rot90(q.tangent), q.gamma));
    LimitSample ls;
    ls.theta = th;
    ls.ratio = c1d(bp, jp) / cent_explicit(bp, jp);
    ls.predicted_4 = 4.0 / support;
    ls.predicted_2 = 2.0 / support;
    rep.limit_err_4 = std::max(rep.limit_err_4, std::abs(ls.ratio / ls.predicted_4 - 1.0));
    rep.limit_err_2 = std::max(rep.limit_err_2, std::abs(ls.ratio / ls.predicted_2 - 1.0));
    rep.limit.push_back(ls);
  }
  rep.limit_match = rep.limit_err_4 < 0.01 ? "4" : (rep.limit_err_2 < 0.01 ? "2" : "neither");
  return rep;
}

nlohmann::json to_json(const BoundsReport& r) {
  nlohmann::json j;
  j["pairs"] = r.pairs.size();
  j["ratio_sup"] = r.ratio_sup;
  j["ratio_inf"] = r.ratio_inf;
  j["cent_pi_violations"] = r.cent_pi_violations;
  j["cent_pi_max_ratio"] = r.cent_pi_max_ratio;
  nlohmann::json lim = nlohmann::json::array();
  for (const auto& l : r.limit) {
    lim.push_back({{"theta", l.theta}, {"ratio", l.ratio}, {"predicted_4", l.predicted_4},
                   {"predicted_2", l.predicted_2}});
  }
  j["small_jump_limit"] = lim;
  j["limit_rel_err_4"] = r.limit_err_4;
  j["limit_rel_err_2"] = r.limit_err_2;
  j["limit_match"] = r.limit_match;
  return j;
}

}  // namespace anisoag
