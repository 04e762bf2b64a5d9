#include "anisoag/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace anisoag {

namespace {

// Solves M z = r in place (M is m×m row-major); returns false if singular.
bool solve_dense(std::vector<double> M, std::vector<double>& r, int m) {
  for (int k = 0; k < m; ++k) {
    int piv = k;
    for (int i = k + 1; i < m; ++i) {
      if (std::abs(M[i * m + k]) > std::abs(M[piv * m + k])) piv = i;
    }
    if (std::abs(M[piv * m + k]) < 1e-300) return false;
    if (piv != k) {
      for (int j = 0; j < m; ++j) std::swap(M[k * m + j], M[piv * m + j]);
      std::swap(r[k], r[piv]);
    }
    for (int i = k + 1; i < m; ++i) {
      const double f = M[i * m + k] / M[k * m + k];
      if (f == 0.0) continue;
      for (int j = k; j < m; ++j) M[i * m + j] -= f * M[k * m + j];
      r[i] -= f * r[k];
    }
  }
  for (int k = m - 1; k >= 0; --k) {
    double s = r[k];
    for (int j = k + 1; j < m; ++j) s -= M[k * m + j] * r[j];
    r[k] = s / M[k * m + k];
  }
  return true;
}

struct Simplex {
  int m = 0;
  int n = 0;  // structural + artificial
  std::vector<double> A;  // column-major m×n
  std::vector<double> lo, hi, x;
  std::vector<int> basis;
  std::vector<char> is_basic;
  double scale = 1.0;

  double col(int i, int j) const { return A[static_cast<std::size_t>(j) * m + i]; }

  std::vector<double> basis_matrix(bool transpose) const {
    std::vector<double> B(static_cast<std::size_t>(m) * m);
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < m; ++i) {
        if (transpose) {
          B[k * m + i] = col(i, basis[k]);
        } else {
          B[i * m + k] = col(i, basis[k]);
        }
      }
    }
    return B;
  }

  // One simplex phase maximizing cost·x. Returns iterations used, or -1 on failure.
  int run(const std::vector<double>& cost, int max_iter, const std::vector<char>& frozen,
          std::string& why) {
    const double tol = 1e-11 * scale;
    int degenerate_run = 0;
    for (int it = 0; it < max_iter; ++it) {
      std::vector<double> y(m);
      for (int k = 0; k < m; ++k) y[k] = cost[basis[k]];
      if (!solve_dense(basis_matrix(true), y, m)) {
        why = "singular basis";
        return -1;
      }
      const bool bland = degenerate_run > 50;
      int enter = -1;
      double best = 0.0;
      int dir = 0;
      for (int j = 0; j < n; ++j) {
        if (is_basic[j] || frozen[j]) continue;
        double d = cost[j];
        for (int i = 0; i < m; ++i) d -= y[i] * col(i, j);
        int s = 0;
        if (d > tol && x[j] < hi[j]) s = 1;
        if (d < -tol && x[j] > lo[j]) s = -1;
        if (s == 0) continue;
        if (bland) {
          enter = j;
          dir = s;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = j;
          dir = s;
        }
      }
      if (enter < 0) return it;

      std::vector<double> w(m);
      for (int i = 0; i < m; ++i) w[i] = col(i, enter);
      if (!solve_dense(basis_matrix(false), w, m)) {
        why = "singular basis";
        return -1;
      }
      // x_B moves by −dir·t·w
      double t = hi[enter] - lo[enter];
      int leave = -1;
      bool leave_to_upper = false;
      for (int k = 0; k < m; ++k) {
        const double rate = -dir * w[k];
        const int bj = basis[k];
        if (rate > 1e-12) {
          const double room = (hi[bj] - x[bj]) / rate;
          if (room < t) {
            t = room;
            leave = k;
            leave_to_upper = true;
          }
        } else if (rate < -1e-12) {
          const double room = (x[bj] - lo[bj]) / -rate;
          if (room < t) {
            t = room;
            leave = k;
            leave_to_upper = false;
          }
        }
      }
      if (!std::isfinite(t)) {
        why = "unbounded direction";
        return -1;
      }
      t = std::max(t, 0.0);
      degenerate_run = t <= 1e-15 * scale ? degenerate_run + 1 : 0;
      x[enter] += dir * t;
      for (int k = 0; k < m; ++k) x[basis[k]] -= dir * t * w[k];
      if (leave < 0) {
        x[enter] = dir > 0 ? hi[enter] : lo[enter];
        continue;
      }
      const int out = basis[leave];
      x[out] = leave_to_upper ? hi[out] : lo[out];
      is_basic[out] = 0;
      basis[leave] = enter;
      is_basic[enter] = 1;
    }
    why = "iteration limit";
    return max_iter;
  }
};

}  // namespace

LpSolution solve_bounded_lp(const BoundedLp& lp, int max_iterations) {
  const int m = lp.rows;
  const int ns = lp.cols;
  if (m <= 0 || ns <= 0 || static_cast<int>(lp.a.size()) != m * ns ||
      static_cast<int>(lp.b.size()) != m || static_cast<int>(lp.c.size()) != ns ||
      static_cast<int>(lp.lower.size()) != ns || static_cast<int>(lp.upper.size()) != ns) {
    throw std::invalid_argument("solve_bounded_lp: inconsistent problem dimensions");
  }
  Simplex s;
  s.m = m;
  s.n = ns + m;
  s.A.assign(static_cast<std::size_t>(s.n) * m, 0.0);
  std::copy(lp.a.begin(), lp.a.end(), s.A.begin());
  s.lo = lp.lower;
  s.hi = lp.upper;
  s.x.resize(s.n);
  for (int j = 0; j < ns; ++j) {
    if (!(lp.lower[j] <= lp.upper[j]) || !std::isfinite(lp.lower[j]) || !std::isfinite(lp.upper[j])) {
      throw std::invalid_argument("solve_bounded_lp: bounds must be finite and ordered");
    }
    s.x[j] = lp.c[j] >= 0.0 ? lp.upper[j] : lp.lower[j];
  }
  std::vector<double> resid(lp.b);
  for (int j = 0; j < ns; ++j) {
    for (int i = 0; i < m; ++i) resid[i] -= lp.at(i, j) * s.x[j];
  }
  double amax = 0.0;
  for (double v : lp.a) amax = std::max(amax, std::abs(v));
  s.scale = std::max(1e-300, amax);
  for (int i = 0; i < m; ++i) {
    const int j = ns + i;
    const double sign = resid[i] >= 0.0 ? 1.0 : -1.0;
    s.A[static_cast<std::size_t>(j) * m + i] = sign;
    s.lo.push_back(0.0);
    s.hi.push_back(std::numeric_limits<double>::infinity());
    s.x[j] = std::abs(resid[i]);
    s.basis.push_back(j);
  }
  s.is_basic.assign(s.n, 0);
  for (int j : s.basis) s.is_basic[j] = 1;

  LpSolution out;
  std::string why;
  std::vector<char> frozen(s.n, 0);
  std::vector<double> phase1(s.n, 0.0);
  for (int i = 0; i < m; ++i) phase1[ns + i] = -1.0;
  int it1 = s.run(phase1, max_iterations, frozen, why);
  if (it1 < 0) {
    out.status = LpStatus::iteration_limit;
    out.diagnostics = "phase 1: " + why;
    return out;
  }
  double infeas = 0.0;
  for (int i = 0; i < m; ++i) infeas += s.x[ns + i];
  if (infeas > 1e-9 * std::max(1.0, s.scale)) {
    out.status = it1 >= max_iterations ? LpStatus::iteration_limit : LpStatus::infeasible;
    std::ostringstream os;
    os << "phase 1 ended with infeasibility " << infeas << " after " << it1 << " iterations";
    out.diagnostics = os.str();
    out.iterations = it1;
    return out;
  }
  for (int i = 0; i < m; ++i) {
    s.hi[ns + i] = 0.0;
    s.x[ns + i] = std::max(0.0, std::min(0.0, s.x[ns + i]));
    frozen[ns + i] = 1;
  }
  std::vector<double> phase2(s.n, 0.0);
  std::copy(lp.c.begin(), lp.c.end(), phase2.begin());
  const int it2 = s.run(phase2, max_iterations - it1, frozen, why);
  out.iterations = it1 + std::max(it2, 0);
  if (it2 < 0 || it1 + it2 >= max_iterations) {
    out.status = LpStatus::iteration_limit;
    std::ostringstream os;
    os << "phase 2: " << why << " after " << out.iterations << " iterations";
    out.diagnostics = os.str();
    return out;
  }
  out.status = LpStatus::optimal;
  out.x.assign(s.x.begin(), s.x.begin() + ns);
  out.objective = 0.0;
  for (int j = 0; j < ns; ++j) out.objective += lp.c[j] * out.x[j];
  for (int i = 0; i < m; ++i) {
    double r = -lp.b[i];
    for (int j = 0; j < ns; ++j) r += lp.at(i, j) * out.x[j];
    out.primal_residual = std::max(out.primal_residual, std::abs(r));
  }
  return out;
}

}  // namespace anisoag
