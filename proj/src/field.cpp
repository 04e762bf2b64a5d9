#include "anisoag/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "anisoag/errors.hpp"
#include "anisoag/parallel.hpp"
#include "anisoag/quadrature.hpp"

namespace anisoag {

GridSpec GridSpec::unit_square(int n, double cells_per_eps) {
  GridSpec g;
  g.nx = n;
  g.ny = n;
  g.h = 1.0 / n;
  g.eps = cells_per_eps / n;
  return g;
}

GridField::GridField(const GridSpec& g) : g_(g) {
  if (g.nx < 2 || g.ny < 2) throw std::invalid_argument("grid needs at least 2x2 cells");
  if (!(g.h > 0.0) || !(g.eps > 0.0)) throw std::invalid_argument("grid spacing and epsilon must be positive");
  u_.assign(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1), 0.0);
  m_.assign(static_cast<std::size_t>(g.nx) * g.ny, Vec2{0, 0});
}

void GridField::set_eps(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  g_.eps = eps;
}

void GridField::update_cell(int i, int j) {
  const double u00 = u(i, j);
  const double u10 = u(i + 1, j);
  const double u01 = u(i, j + 1);
  const double u11 = u(i + 1, j + 1);
  const double inv = 0.5 / g_.h;
  const double d1 = (u10 + u11 - u00 - u01) * inv;
  const double d2 = (u01 + u11 - u00 - u10) * inv;
  m_[cell_index(i, j)] = Vec2{-d2, d1};
}

void GridField::set_u(std::vector<double> u) {
  if (u.size() != u_.size()) throw std::invalid_argument("set_u: wrong number of nodes");
  u_ = std::move(u);
  for (int j = 0; j < g_.ny; ++j) {
    for (int i = 0; i < g_.nx; ++i) update_cell(i, j);
  }
}

void GridField::set_node(int i, int j, double value) {
  u_[node_index(i, j)] = value;
  for (int cj = std::max(0, j - 1); cj <= std::min(g_.ny - 1, j); ++cj) {
    for (int ci = std::max(0, i - 1); ci <= std::min(g_.nx - 1, i); ++ci) update_cell(ci, cj);
  }
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(os, v);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::invalid_argument("grid file truncated");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return v;
}

double get_f64(std::istream& is) {
  const std::uint64_t v = get_u64(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace

void GridField::write_binary(std::ostream& os) const {
  put_u64(os, static_cast<std::uint64_t>(g_.nx));
  put_u64(os, static_cast<std::uint64_t>(g_.ny));
  put_f64(os, g_.h);
  put_f64(os, g_.eps);
  for (double v : u_) put_f64(os, v);
}

GridField GridField::read_binary(std::istream& is) {
  GridSpec g;
  const std::uint64_t nx = get_u64(is);
  const std::uint64_t ny = get_u64(is);
  if (nx < 2 || ny < 2 || nx > (1u << 20) || ny > (1u << 20)) throw std::invalid_argument("grid file: bad dimensions");
  g.nx = static_cast<int>(nx);
  g.ny = static_cast<int>(ny);
  g.h = get_f64(is);
  g.eps = get_f64(is);
  GridField f(g);
  std::vector<double> u(f.u_.size());
  for (double& v : u) v = get_f64(is);
  f.set_u(std::move(u));
  return f;
}

void GridField::write_csv(std::ostream& os) const {
  os << "i,j,x,y,m1,m2\n";
  char buf[160];
  for (int j = 0; j < g_.ny; ++j) {
    for (int i = 0; i < g_.nx; ++i) {
      const Vec2 c = cell_center(i, j);
      const Vec2 v = m(i, j);
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g\n", i, j, c.x, c.y, v.x, v.y);
      os << buf;
    }
  }
}

std::vector<double> node_divergence(const GridField& f, const std::vector<Vec2>& v) {
  const int nx = f.nx();
  const int ny = f.ny();
  const double inv = 0.5 / f.h();
  std::vector<double> out(static_cast<std::size_t>(nx - 1) * (ny - 1));
  for (int j = 1; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const Vec2 ur = v[f.cell_index(i, j)];
      const Vec2 ul = v[f.cell_index(i - 1, j)];
      const Vec2 lr = v[f.cell_index(i, j - 1)];
      const Vec2 ll = v[f.cell_index(i - 1, j - 1)];
      out[(j - 1) * (nx - 1) + (i - 1)] = ((ur.x + lr.x) - (ul.x + ll.x)) * inv + ((ur.y + ul.y) - (lr.y + ll.y)) * inv;
    }
  }
  return out;
}

std::vector<Vec2> node_gradient(const GridField& f, const std::vector<double>& s) {
  const int nx = f.nx();
  const int ny = f.ny();
  const double inv = 0.5 / f.h();
  std::vector<Vec2> out(static_cast<std::size_t>(nx - 1) * (ny - 1));
  for (int j = 1; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const double ur = s[f.cell_index(i, j)];
      const double ul = s[f.cell_index(i - 1, j)];
      const double lr = s[f.cell_index(i, j - 1)];
      const double ll = s[f.cell_index(i - 1, j - 1)];
      out[(j - 1) * (nx - 1) + (i - 1)] = Vec2{((ur + lr) - (ul + ll)) * inv, ((ur + ul) - (lr + ll)) * inv};
    }
  }
  return out;
}

GridField potential_field(const GridSpec& g, const std::function<double(Vec2)>& fn) {
  GridField f(g);
  std::vector<double> u(f.u().size());
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) u[f.node_index(i, j)] = fn(f.node_pos(i, j));
  }
  f.set_u(std::move(u));
  return f;
}

namespace {
// ∇u = w with i w = z
Vec2 potential_slope(Vec2 z) { return Vec2{z.y, -z.x}; }
}  // namespace

GridField constant_field(const GridSpec& g, Vec2 z) {
  const Vec2 w = potential_slope(z);
  return potential_field(g, [w](Vec2 x) { return dot(w, x); });
}

GridField jump_field(const GridSpec& g, Vec2 z_plus, Vec2 z_minus, Vec2 p, Vec2 n) {
  if (!(n.norm() > 0.0)) throw std::invalid_argument("jump_field: zero line normal");
  n = n / n.norm();
  const double mismatch = dot(z_plus - z_minus, n);
  if (std::abs(mismatch) > 1e-9 * std::max(1.0, (z_plus - z_minus).norm())) {
    throw std::invalid_argument(
        "jump_field: (z+ - z-).n != 0; a jump across this line cannot be divergence-free");
  }
  const Vec2 wp = potential_slope(z_plus);
  const Vec2 wm = potential_slope(z_minus);
  return potential_field(g, [=](Vec2 x) {
    const Vec2 d = x - p;
    return dot(d, n) > 0.0 ? dot(wp, d) : dot(wm, d);
  });
}

GridField profile_jump_field(const GridSpec& g, const Profile& prof, Vec2 p) {
  if (prof.x.size() < 2) throw std::invalid_argument("profile_jump_field: empty profile");
  const Vec2 nu = prof.jump.nu;
  const Vec2 inu = rot90(nu);
  const double a = prof.jump.a;
  const double eps = g.eps;
  // Z(x) = ∫₀ˣ ζ at the samples, exact for the Hermite interpolant
  const std::size_t n = prof.x.size();
  std::vector<double> slope(n);
  for (std::size_t k = 0; k < n; ++k) slope[k] = prof.direction * std::sqrt(0.5 * prof.integrand[k]);
  std::vector<double> Z(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double dx = prof.x[k] - prof.x[k - 1];
    Z[k] = Z[k - 1] + dx * (prof.zeta[k - 1] + prof.zeta[k]) / 2 + dx * dx * (slope[k - 1] - slope[k]) / 12;
  }
  const std::size_t k0 = static_cast<std::size_t>(std::lower_bound(prof.x.begin(), prof.x.end(), 0.0) - prof.x.begin());
  const double z_at_0 = Z[k0];
  for (double& v : Z) v -= z_at_0;
  auto antider = [&](double t) {
    if (t <= prof.x.front()) return Z.front() + prof.zeta.front() * (t - prof.x.front());
    if (t >= prof.x.back()) return Z.back() + prof.zeta.back() * (t - prof.x.back());
    const std::size_t k = static_cast<std::size_t>(std::upper_bound(prof.x.begin(), prof.x.end(), t) - prof.x.begin()) - 1;
    return Z[k] + integrate_gauss<4>([&](double s) { return profile_at(prof, s); }, prof.x[k], t);
  };
  return potential_field(g, [&](Vec2 x) {
    const Vec2 d = x - p;
    return -a * dot(inu, d) + eps * antider(dot(d, nu) / eps);
  });
}

GridField vortex_field(const BoundaryParam& bp, const GridSpec& g, Vec2 x0, int sign, double core) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("vortex_field: sign must be +1 or -1");
  if (core < 0.0) throw std::invalid_argument("vortex_field: negative core radius");
  const Vec2 hi = g.origin + Vec2{g.nx * g.h, g.ny * g.h};
  if (x0.x < g.origin.x || x0.y < g.origin.y || x0.x > hi.x || x0.y > hi.y) {
    throw std::invalid_argument("vortex_field: centre outside the domain");
  }
  return potential_field(g, [&](Vec2 x) {
    const Vec2 y = rot90(x - x0);
    const double d = y.norm() == 0.0 ? 0.0 : bp.dual_norm(y);
    const double s = d >= core ? d : d * d / (2.0 * core) + 0.5 * core;
    return sign * s;
  });
}

Vec2 vortex_exact(const BoundaryParam& bp, Vec2 x, Vec2 x0, int sign) {
  return bp.vortex(rot90(x - x0)) * static_cast<double>(sign);
}

namespace {

double potential_density(const BoundaryParam& bp, Vec2 m) {
  const double r = bp.norm(m);
  const double w = 1.0 - r * r;
  return w * w;
}

}  // namespace

EnergyParts energy_parts(const BoundaryParam& bp, const GridField& f, int jobs) {
  const int nx = f.nx();
  const int ny = f.ny();
  const double h2e = f.h() * f.h() / f.eps();
  const double eps = f.eps();
  std::vector<EnergyParts> rows(ny);
  parallel_for(static_cast<std::size_t>(ny), jobs, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    EnergyParts acc;
    for (int i = 0; i < nx; ++i) {
      const Vec2 m = f.m(i, j);
      acc.potential += h2e * potential_density(bp, m);
      if (i + 1 < nx) {
        const Vec2 d = f.m(i + 1, j) - m;
        acc.gradient += eps * dot(d, d);
      }
      if (j + 1 < ny) {
        const Vec2 d = f.m(i, j + 1) - m;
        acc.gradient += eps * dot(d, d);
      }
    }
    rows[j] = acc;
  });
  EnergyParts total;
  for (const auto& r : rows) {
    total.potential += r.potential;
    total.gradient += r.gradient;
  }
  return total;
}

double energy(const BoundaryParam& bp, const GridField& f, int jobs) { return energy_parts(bp, f, jobs).total(); }

std::vector<double> energy_gradient(const BoundaryParam& bp, const GridField& f, int jobs) {
  const int nx = f.nx();
  const int ny = f.ny();
  const double h2e = f.h() * f.h() / f.eps();
  const double eps = f.eps();
  std::vector<Vec2> gm(static_cast<std::size_t>(nx) * ny);
  parallel_for(static_cast<std::size_t>(ny), jobs, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < nx; ++i) {
      const Vec2 m = f.m(i, j);
      Vec2 g{0, 0};
      const double r = bp.norm(m);
      if (r > 0.0) g = bp.norm_gradient(m) * (-4.0 * (1.0 - r * r) * r * h2e);
      if (i > 0) g += (m - f.m(i - 1, j)) * (2.0 * eps);
      if (i + 1 < nx) g += (m - f.m(i + 1, j)) * (2.0 * eps);
      if (j > 0) g += (m - f.m(i, j - 1)) * (2.0 * eps);
      if (j + 1 < ny) g += (m - f.m(i, j + 1)) * (2.0 * eps);
      gm[f.cell_index(i, j)] = g;
    }
  });
  const double inv = 0.5 / f.h();
  std::vector<double> out(f.u().size(), 0.0);
  parallel_for(static_cast<std::size_t>(ny + 1), jobs, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i <= nx; ++i) {
      double acc = 0.0;
      if (i < nx && j < ny) {
        const Vec2 g = gm[f.cell_index(i, j)];
        acc += (g.x - g.y) * inv;
      }
      if (i > 0 && j < ny) {
        const Vec2 g = gm[f.cell_index(i - 1, j)];
        acc += (g.x + g.y) * inv;
      }
      if (i < nx && j > 0) {
        const Vec2 g = gm[f.cell_index(i, j - 1)];
        acc += (-g.x - g.y) * inv;
      }
      if (i > 0 && j > 0) {
        const Vec2 g = gm[f.cell_index(i - 1, j - 1)];
        acc += (-g.x + g.y) * inv;
      }
      out[f.node_index(i, j)] = acc;
    }
  });
  return out;
}

namespace {

void check_finite(const BoundaryParam& bp, const GridField& f, double e) {
  if (std::isfinite(e)) return;
  for (int j = 0; j < f.ny(); ++j) {
    for (int i = 0; i < f.nx(); ++i) {
      if (!std::isfinite(potential_density(bp, f.m(i, j)))) {
        std::ostringstream os;
        os << "minimize: non-finite energy density at cell (" << i << ", " << j << ")";
        throw NumericalError(os.str());
      }
    }
  }
  throw NumericalError("minimize: non-finite energy");
}

}  // namespace

MinimizeResult minimize(const BoundaryParam& bp, GridField f, const MinimizeOptions& opt) {
  const std::size_t nn = f.u().size();
  std::vector<unsigned char> interior(nn, 0);
  for (int j = 0; j <= f.ny(); ++j) {
    for (int i = 0; i <= f.nx(); ++i) interior[f.node_index(i, j)] = f.is_boundary_node(i, j) ? 0 : 1;
  }
  auto grad = [&](const GridField& fld) {
    std::vector<double> g = energy_gradient(bp, fld, opt.jobs);
    for (std::size_t k = 0; k < nn; ++k) {
      if (!interior[k]) g[k] = 0.0;
    }
    return g;
  };
  auto dotv = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
  };

  MinimizeResult res{f, {}, 0, false, ""};
  double e = energy(bp, f, opt.jobs);
  check_finite(bp, f, e);
  res.energies.push_back(e);
  std::vector<double> g = grad(f);
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  // a gradient this small corresponds to a norm defect of order 1e-13
  const double gtol = 1e-12 * f.h() / f.eps();
  if (gmax <= gtol) {
    res.converged = true;
    res.reason = "zero gradient";
    res.field = std::move(f);
    return res;
  }

  std::vector<std::vector<double>> S;
  std::vector<std::vector<double>> Y;
  std::vector<double> rho;
  std::vector<double> d(nn);
  std::vector<double> alpha_buf;
  for (int it = 0; it < opt.max_iter; ++it) {
    // two-loop recursion
    d = g;
    const std::size_t k = S.size();
    alpha_buf.assign(k, 0.0);
    for (std::size_t q = k; q-- > 0;) {
      alpha_buf[q] = rho[q] * dotv(S[q], d);
      for (std::size_t t = 0; t < nn; ++t) d[t] -= alpha_buf[q] * Y[q][t];
    }
    double scale = 0.0;
    if (k > 0) {
      scale = dotv(S[k - 1], Y[k - 1]) / dotv(Y[k - 1], Y[k - 1]);
    } else {
      scale = 1e-2 * f.h() / gmax;
    }
    for (double& v : d) v *= scale;
    for (std::size_t q = 0; q < k; ++q) {
      const double beta = rho[q] * dotv(Y[q], d);
      for (std::size_t t = 0; t < nn; ++t) d[t] += S[q][t] * (alpha_buf[q] - beta);
    }
    for (double& v : d) v = -v;
    double slope = dotv(g, d);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      for (std::size_t t = 0; t < nn; ++t) d[t] = -g[t] * 1e-2 * f.h() / gmax;
      slope = dotv(g, d);
    }

    double step = 1.0;
    bool accepted = false;
    GridField trial = f;
    double e_new = e;
    std::vector<double> u_new(nn);
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t t = 0; t < nn; ++t) u_new[t] = f.u()[t] + step * d[t];
      trial.set_u(u_new);
      e_new = energy(bp, trial, opt.jobs);
      if (std::isfinite(e_new) && e_new <= e + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      check_finite(bp, trial, e_new);
      res.converged = true;
      res.reason = "line search found no decrease";
      break;
    }
    std::vector<double> g_new = grad(trial);
    std::vector<double> s(nn);
    std::vector<double> y(nn);
    for (std::size_t t = 0; t < nn; ++t) {
      s[t] = trial.u()[t] - f.u()[t];
      y[t] = g_new[t] - g[t];
    }
    const double sy = dotv(s, y);
    if (sy > 1e-16 * std::sqrt(dotv(s, s) * dotv(y, y))) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opt.history) {
        S.erase(S.begin());
        Y.erase(Y.begin());
        rho.erase(rho.begin());
      }
    }
    const double decrease = e - e_new;
    f = std::move(trial);
    g = std::move(g_new);
    gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    e = e_new;
    res.energies.push_back(e);
    res.iterations = it + 1;
    if (decrease <= opt.tol * std::abs(e) || gmax <= gtol) {
      res.converged = true;
      res.reason = "relative decrease below tolerance";
      break;
    }
  }
  if (!res.converged) res.reason = "iteration cap";
  res.field = std::move(f);
  return res;
}

namespace {

ProductionMeasure measure_from(const GridField& f, std::vector<double> values) {
  ProductionMeasure pm;
  pm.nx = f.nx() - 1;
  pm.ny = f.ny() - 1;
  pm.h = f.h();
  const double area = f.h() * f.h();
  double vmax = 0.0;
  for (double v : values) {
    pm.total_variation += std::abs(v) * area;
    pm.signed_total += v * area;
    vmax = std::max(vmax, std::abs(v));
  }
  pm.support.resize(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    pm.support[k] = vmax > 0.0 && std::abs(values[k]) > 1e-9 * vmax;
  }
  pm.values = std::move(values);
  return pm;
}

}  // namespace

ProductionMeasure entropy_production(const GridField& f, const EntropyFn& e) {
  const BoundaryParam& bp = e.boundary();
  std::vector<Vec2> phi(f.m().size());
  for (std::size_t c = 0; c < phi.size(); ++c) {
    const Vec2 m = f.m()[c];
    if (std::abs(bp.norm(m) - 1.0) > 1e-6) {
      throw std::invalid_argument("entropy_production: field leaves the unit circle; use the extended entropy");
    }
    phi[c] = e.phi_at_point(m);
  }
  return measure_from(f, node_divergence(f, phi));
}

ProductionMeasure entropy_production(const GridField& f, const ExtendedEntropy& e) {
  std::vector<Vec2> phi(f.m().size());
  for (std::size_t c = 0; c < phi.size(); ++c) phi[c] = e.eval(f.m()[c]).phi_hat;
  return measure_from(f, node_divergence(f, phi));
}

std::vector<double> extended_identity_residual(const GridField& f, const ExtendedEntropy& e) {
  const BoundaryParam& bp = e.entropy().boundary();
  const std::size_t nc = f.m().size();
  std::vector<Vec2> phi(nc);
  std::vector<Vec2> psi(nc);
  std::vector<double> g(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const ExtendedValue v = e.eval(f.m()[c]);
    phi[c] = v.phi_hat;
    psi[c] = v.psi;
    const double r = bp.norm(f.m()[c]);
    g[c] = 1.0 - r * r;
  }
  std::vector<double> div = node_divergence(f, phi);
  const std::vector<Vec2> grad = node_gradient(f, g);
  const int nx = f.nx();
  for (int j = 1; j < f.ny(); ++j) {
    for (int i = 1; i < nx; ++i) {
      const Vec2 avg = (psi[f.cell_index(i, j)] + psi[f.cell_index(i - 1, j)] + psi[f.cell_index(i, j - 1)] +
                        psi[f.cell_index(i - 1, j - 1)]) *
                       0.25;
      const std::size_t k = static_cast<std::size_t>(j - 1) * (nx - 1) + (i - 1);
      div[k] -= 0.5 * dot(avg, grad[k]);
    }
  }
  return div;
}

double besov_functional(const BoundaryParam& bp, const GridField& f, int di, int dj, const CellRect& sub) {
  if (di == 0 && dj == 0) throw std::invalid_argument("besov_functional: zero offset");
  if (sub.i0 < 0 || sub.j0 < 0 || sub.i1 > f.nx() || sub.j1 > f.ny() || sub.i0 >= sub.i1 || sub.j0 >= sub.j1) {
    throw std::invalid_argument("besov_functional: subdomain outside the grid");
  }
  if (sub.i0 + di < 0 || sub.j0 + dj < 0 || sub.i1 + di > f.nx() || sub.j1 + dj > f.ny()) {
    throw std::invalid_argument("besov_functional: offset reaches past the domain boundary");
  }
  std::vector<double> theta(f.m().size(), std::numeric_limits<double>::quiet_NaN());
  auto th = [&](int i, int j) {
    double& t = theta[f.cell_index(i, j)];
    if (std::isnan(t)) {
      const Vec2 m = f.m(i, j);
      if (m.norm() == 0.0) throw std::invalid_argument("besov_functional: zero field value");
      t = bp.theta_of_direction(m);
    }
    return t;
  };
  double acc = 0.0;
  for (int j = sub.j0; j < sub.j1; ++j) {
    for (int i = sub.i0; i < sub.i1; ++i) {
      const double a = th(i, j);
      const double b = th(i + di, j + dj);
      if (a != b) acc += pi_fast(bp, a, b);
    }
  }
  const double len = std::hypot(di, dj) * f.h();
  return acc * f.h() * f.h() / len;
}

double TestFunction::value(Vec2 x) const {
  const Vec2 d = x - center;
  const double q = dot(d, d) / (radius * radius);
  if (q >= 1.0) return 0.0;
  const double w = 1.0 - q;
  return w * w * w;
}

Vec2 TestFunction::gradient(Vec2 x) const {
  const Vec2 d = x - center;
  const double q = dot(d, d) / (radius * radius);
  if (q >= 1.0) return Vec2{0, 0};
  const double w = 1.0 - q;
  return d * (-6.0 * w * w / (radius * radius));
}

KineticResult kinetic_residual(const BoundaryParam& bp, const GridField& f, double t, const TestFunction& z) {
  const BoundaryPoint q = bp.query(t);
  const Vec2 igam = rot90(q.gamma);
  KineticResult r;
  const double area = f.h() * f.h();
  for (int j = 0; j < f.ny(); ++j) {
    for (int i = 0; i < f.nx(); ++i) {
      const Vec2 c = f.cell_center(i, j);
      if (z.value(c) <= 0.0) continue;
      const Vec2 m = f.m(i, j);
      r.norm_defect = std::max(r.norm_defect, std::abs(bp.norm(m) - 1.0));
      if (dot(m, igam) > 0.0) r.value += dot(q.tangent, z.gradient(c)) * area;
    }
  }
  return r;
}

VortexDecay vortex_decay_study(const BoundaryParam& bp, const std::vector<double>& eps_list, double cells_per_eps,
                               int jobs) {
  if (eps_list.empty()) throw std::invalid_argument("vortex_decay_study: empty epsilon list");
  if (!(cells_per_eps >= 1.0)) throw std::invalid_argument("vortex_decay_study: cells_per_eps must be >= 1");
  VortexDecay out;
  for (double eps : eps_list) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("vortex_decay_study: epsilon must lie in (0, 0.5)");
    const int n = std::max(2, static_cast<int>(std::lround(cells_per_eps / eps)));
    GridSpec g = GridSpec::unit_square(n, 1.0);
    g.eps = eps;
    const GridField f = vortex_field(bp, g, Vec2{0.5, 0.5}, 1, eps);
    out.rows.push_back({eps, g.h, n, energy(bp, f, jobs)});
  }
  out.strictly_decreasing = true;
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    const bool finer = out.rows[k].eps < out.rows[k - 1].eps;
    if (finer != (out.rows[k].energy < out.rows[k - 1].energy)) out.strictly_decreasing = false;
  }
  double num = 0.0;
  double den = 0.0;
  for (const auto& r : out.rows) {
    const double b = r.eps * std::log(1.0 / r.eps);
    num += r.energy * b;
    den += b * b;
  }
  out.fit_c = num / den;
  double ss = 0.0;
  for (const auto& r : out.rows) {
    const double rel = (out.fit_c * r.eps * std::log(1.0 / r.eps) - r.energy) / r.energy;
    ss += rel * rel;
  }
  out.fit_rel_residual = std::sqrt(ss / out.rows.size());
  return out;
}

}  // namespace anisoag
