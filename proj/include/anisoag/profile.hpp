#pragma once
/**
 * @file profile.hpp
 * @brief Optimal one-dimensional transition between two boundary states.
 *
 * The profile ζ solves ζ' = ±(1 − ‖aν + ζ iν‖²) and connects z⁻·iν at x = −∞
 * to z⁺·iν at x = +∞. Along it the two halves of the energy density agree,
 * so the transition energy equals c^1D.
 */
#include <ostream>
#include <string>
#include <vector>

#include "anisoag/costs.hpp"

namespace anisoag {

struct Profile {
  JumpPair jump;
  std::vector<double> x;
  std::vector<double> zeta;
  std::vector<double> integrand;  ///< ζ'² + (1 − ‖aν + ζ iν‖²)²
  double zeta_minus = 0.0;        ///< z⁻·iν
  double zeta_plus = 0.0;         ///< z⁺·iν
  double direction = 1.0;         ///< sign of ζ'
  double err_minus = 0.0;         ///< |ζ(x.front()) − z⁻·iν|
  double err_plus = 0.0;
  double core_energy = 0.0;       ///< ∫ over [x.front(), x.back()]
  double tail_energy = 0.0;       ///< linearized estimate of both tails
  double tail_bound = 0.0;        ///< twice the estimate; exact bound when the rate is monotone
  double tail_order_minus = 0.0;  ///< q in f ~ gap^q near each end (1 means exponential approach)
  double tail_order_plus = 0.0;
  bool converged = false;
  std::string diagnostics;

  double length() const { return x.empty() ? 0.0 : x.back() - x.front(); }
  void write_csv(std::ostream& os) const;
};

struct ProfileOptions {
  double tol = 1e-8;
  double start_fraction = 0.5;  ///< ζ(0) as a fraction of the way from z⁻·iν to z⁺·iν
  long max_steps = 2000000;
  double max_length = 1e9;
};

/// Throws std::invalid_argument for tol outside [1e-10, 1e-3] or start_fraction outside (0, 1).
/// Hitting the step or length cap returns a partial profile with converged = false.
Profile solve_profile(const BoundaryParam& bp, const JumpPair& jp, const ProfileOptions& opt = {});

/// core_energy + tail_energy.
double profile_energy(const Profile& p);

/// ζ at x by cubic Hermite interpolation of the samples (slopes from the ODE), clamped to the ends.
double profile_at(const Profile& p, double x);

}  // namespace anisoag
