#pragma once
/**
 * @file lp.hpp
 * @brief Dense bounded-variable primal simplex for problems with few equality rows.
 *
 *   maximize cᵀx  subject to  A x = b,  lower ≤ x ≤ upper
 *
 * A has m rows (m small, typically ≤ 10) and any number of columns. Bounds
 * must be finite. Phase 1 starts from a crash point with every variable at the
 * bound favoured by c, and drives artificial variables to zero.
 */

#include <string>
#include <vector>

namespace anisoag {

struct BoundedLp {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  ///< column-major, a[j * rows + i] = A(i, j)
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> lower;
  std::vector<double> upper;

  double& at(int i, int j) { return a[static_cast<std::size_t>(j) * rows + i]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(j) * rows + i]; }
};

enum class LpStatus { optimal, infeasible, iteration_limit };

struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
  double primal_residual = 0.0;  ///< ‖Ax − b‖∞ at the returned point
  std::string diagnostics;
};

LpSolution solve_bounded_lp(const BoundedLp& lp, int max_iterations = 200000);

}  // namespace anisoag
