#include "anisoag/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "anisoag/errors.hpp"

namespace anisoag {

namespace {

namespace ode = boost::numeric::odeint;
using State = std::array<double, 2>;  // ζ, accumulated energy

struct Branch {
  std::vector<double> x;
  std::vector<double> zeta;
  std::vector<double> rate;  // 1 − ‖aν + ζ iν‖²
  double energy = 0.0;
  double gap = 0.0;
  double tail = 0.0;
  double order = 0.0;
  bool converged = false;
};

// Integrates dζ/ds = dir·f(ζ) from s = 0 towards the limit ζ_end.
template <class F>
Branch run_branch(F&& f, double z0, double z_end, double dir, const ProfileOptions& opt) {
  Branch b;
  auto rhs = [&](const State& s, State& ds, double) {
    const double r = f(s[0]);
    ds[0] = dir * r;
    ds[1] = 2.0 * r * r;
  };
  auto stepper = ode::make_controlled(1e-13, 1e-12, ode::runge_kutta_cash_karp54<State>());
  State st{z0, 0.0};
  double s = 0.0;
  double dt = 1e-3;
  b.x.push_back(0.0);
  b.zeta.push_back(z0);
  b.rate.push_back(f(z0));
  long steps = 0;
  while (true) {
    b.gap = std::abs(z_end - st[0]);
    const double r_end = std::abs(b.rate.back());
    b.tail = r_end * b.gap;
    if (b.gap < opt.tol && 2.0 * b.tail <= opt.tol * std::max(st[1], 1e-300)) {
      b.converged = true;
      break;
    }
    if (steps >= opt.max_steps || s >= opt.max_length) break;
    if (stepper.try_step(rhs, st, s, dt) == ode::success) {
      ++steps;
      b.x.push_back(s);
      b.zeta.push_back(st[0]);
      b.rate.push_back(f(st[0]));
    }
  }
  b.energy = st[1];
  // fitted order of f against the remaining gap over the last samples
  const std::size_t n = b.zeta.size();
  if (n >= 8) {
    const double g1 = std::abs(z_end - b.zeta[n - 8]);
    const double g2 = std::abs(z_end - b.zeta[n - 1]);
    const double f1 = std::abs(b.rate[n - 8]);
    const double f2 = std::abs(b.rate[n - 1]);
    if (g1 > 0 && g2 > 0 && f1 > 0 && f2 > 0 && std::abs(std::log(g1 / g2)) > 1e-6) {
      b.order = std::log(f1 / f2) / std::log(g1 / g2);
    }
  }
  return b;
}

}  // namespace

Profile solve_profile(const BoundaryParam& bp, const JumpPair& jp, const ProfileOptions& opt) {
  if (!(opt.tol >= 1e-10 && opt.tol <= 1e-3)) throw std::invalid_argument("solve_profile: tol must lie in [1e-10, 1e-3]");
  if (!(opt.start_fraction > 0.0 && opt.start_fraction < 1.0)) {
    throw std::invalid_argument("solve_profile: start_fraction must lie in (0, 1)");
  }
  Profile p;
  p.jump = jp;
  const Vec2 inu = rot90(jp.nu);
  p.zeta_minus = dot(jp.z_minus, inu);
  p.zeta_plus = dot(jp.z_plus, inu);
  const double sigma = p.zeta_plus > p.zeta_minus ? 1.0 : -1.0;
  p.direction = sigma;
  auto f = [&](double z) {
    const double r = bp.norm(jp.nu * jp.a + inu * z);
    return 1.0 - r * r;
  };
  const double z0 = p.zeta_minus + opt.start_fraction * (p.zeta_plus - p.zeta_minus);
  const Branch fw = run_branch(f, z0, p.zeta_plus, sigma, opt);
  const Branch bw = run_branch(f, z0, p.zeta_minus, -sigma, opt);

  const std::size_t nb = bw.x.size();
  p.x.reserve(nb + fw.x.size() - 1);
  for (std::size_t i = nb; i-- > 1;) {
    p.x.push_back(-bw.x[i]);
    p.zeta.push_back(bw.zeta[i]);
    p.integrand.push_back(2.0 * bw.rate[i] * bw.rate[i]);
  }
  for (std::size_t i = 0; i < fw.x.size(); ++i) {
    p.x.push_back(fw.x[i]);
    p.zeta.push_back(fw.zeta[i]);
    p.integrand.push_back(2.0 * fw.rate[i] * fw.rate[i]);
  }
  p.err_minus = bw.gap;
  p.err_plus = fw.gap;
  p.core_energy = fw.energy + bw.energy;
  p.tail_energy = fw.tail + bw.tail;
  p.tail_bound = 2.0 * p.tail_energy;
  p.tail_order_minus = bw.order;
  p.tail_order_plus = fw.order;
  p.converged = fw.converged && bw.converged;
  if (!p.converged) {
    std::ostringstream os;
    os << "profile truncated before tolerance: gap- " << bw.gap << " gap+ " << fw.gap << " over length "
       << p.length();
    p.diagnostics = os.str();
  }
  return p;
}

double profile_energy(const Profile& p) { return p.core_energy + p.tail_energy; }

double profile_at(const Profile& p, double x) {
  if (p.x.empty()) return 0.0;
  if (x <= p.x.front()) return p.zeta.front();
  if (x >= p.x.back()) return p.zeta.back();
  const auto it = std::upper_bound(p.x.begin(), p.x.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - p.x.begin());
  const double dx = p.x[k] - p.x[k - 1];
  const double u = (x - p.x[k - 1]) / dx;
  // integrand = 2 f², so |ζ'| = sqrt(integrand / 2)
  const double d0 = p.direction * std::sqrt(0.5 * p.integrand[k - 1]);
  const double d1 = p.direction * std::sqrt(0.5 * p.integrand[k]);
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  return h00 * p.zeta[k - 1] + h10 * dx * d0 + h01 * p.zeta[k] + h11 * dx * d1;
}

void Profile::write_csv(std::ostream& out) const {
  out << "x,zeta,integrand\n";
  char buf[96];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x[i], zeta[i], integrand[i]);
    out << buf;
  }
}

}  // namespace anisoag
