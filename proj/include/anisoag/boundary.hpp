#pragma once
/**
 * @file boundary.hpp
 * @brief Arc-length geometry of the unit circle ∂B of a strictly convex norm.
 *
 * The input norm is rescaled so that ∂B has perimeter 2π: boundary points are
 * multiplied by kappa = 2π / L, where L is the perimeter of the input unit
 * circle, and the rescaled norm is ‖z‖ / kappa. Every quantity exposed here
 * refers to the rescaled norm.
 *
 * The boundary is traced by polar angle φ through ρ(φ) = 1/‖e^{iφ}‖. A fine
 * table of cumulative arc length s(φ) is built once; point queries invert
 * s(φ) = θ by safeguarded Newton steps on top of that table, so γ(θ) and
 * γ'(θ) are accurate to quadrature precision rather than table resolution.
 * α is exact at queried points; Π-type integrals use the piecewise-linear
 * interpolant of the α samples (alpha_linear), and α' is the monotone
 * central-difference density of those samples.
 *
 * Immutable after construction; all queries are const and thread-safe.
 */

#include <iosfwd>
#include <vector>

#include "anisoag/norm.hpp"
#include "anisoag/vec2.hpp"

namespace anisoag {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Result of a boundary query at arc-length parameter θ.
struct BoundaryPoint {
  Vec2 gamma;          ///< γ(θ), on the rescaled unit circle
  Vec2 tangent;        ///< γ'(θ), unit vector
  double alpha = 0.0;  ///< unwrapped tangent angle, e^{iα} = γ'
  double alpha_prime = 0.0;
};

class BoundaryParam {
 public:
  /// Traces ∂B with `resolution` uniform arc-length samples (resolution ≥ 64).
  /// Throws NumericalError if the tracer fails (degenerate or non-convex input).
  static BoundaryParam trace(const NormSpec& norm, int resolution);

  int resolution() const { return static_cast<int>(theta_.size()); }
  double kappa() const { return kappa_; }
  /// Perimeter of the unit circle of the input (unscaled) norm.
  double input_perimeter() const { return input_perimeter_; }
  const NormSpec& input_norm() const { return norm_; }

  const std::vector<double>& theta_samples() const { return theta_; }
  const std::vector<Vec2>& gamma_samples() const { return gamma_; }
  const std::vector<Vec2>& tangent_samples() const { return tangent_; }
  const std::vector<double>& alpha_samples() const { return alpha_; }
  const std::vector<double>& alpha_prime_samples() const { return alpha_prime_; }

  /// α₀ lower bound: min over samples of iγ·γ' (the support value at γ).
  double inradius() const { return inradius_; }
  /// Smallest α increment over one sample interval.
  double min_alpha_increment() const { return min_alpha_increment_; }
  /// Set when some sample interval has (numerically) no turning: B looks non-strictly convex.
  bool flatness_warning() const { return flatness_warning_; }

  /// Rescaled norm ‖z‖/κ and its gradient.
  double norm(Vec2 z) const;
  Vec2 norm_gradient(Vec2 z) const;

  BoundaryPoint query(double theta) const;
  Vec2 gamma(double theta) const;
  Vec2 tangent(double theta) const;
  /// Piecewise-linear interpolation of the α samples, unwrapped for any real θ.
  double alpha_linear(double theta) const;
  /// Inverse of alpha_linear: returns θ with alpha_linear(θ) = a.
  double alpha_inverse(double a) const;

  /// θ ∈ [0, 2π) with γ(θ) = z. Throws std::invalid_argument unless ‖z‖ = 1 within 1e-6.
  double theta_of_point(Vec2 z) const;
  /// θ ∈ [0, 2π) of the boundary point on the ray through z ≠ 0.
  double theta_of_direction(Vec2 z) const;

  /// ‖w‖_* = max_θ w·γ(θ).
  double dual_norm(Vec2 w) const;
  /// V_B(x) = ∇‖x‖_*: the boundary point maximizing x·γ. Throws for x = 0.
  Vec2 vortex(Vec2 x) const;

  /// X(r e^{iθ}) = r γ(θ).
  Vec2 polar_map(Vec2 z) const;
  Vec2 polar_map_inverse(Vec2 y) const;

  /// CSV with columns theta,gx,gy,gpx,gpy,alpha,alpha_prime.
  void write_csv(std::ostream& os) const;

 private:
  BoundaryParam() = default;

  double radius(double phi) const;  // ρ(φ), input norm
  Vec2 curve(double phi) const;     // κ ρ(φ) e^{iφ}
  Vec2 curve_velocity(double phi) const;
  double speed(double phi) const;
  double arc_from_node(std::size_t k, double phi) const;
  double phi_of_arc(double s) const;
  double arc_of_phi(double phi) const;
  double alpha_near(Vec2 tangent, double reference) const;
  double maximize_support(Vec2 w, double& phi_out) const;

  NormSpec norm_;
  double kappa_ = 1.0;
  double input_perimeter_ = kTwoPi;
  double inradius_ = 0.0;
  double min_alpha_increment_ = 0.0;
  bool flatness_warning_ = false;

  std::vector<double> fine_phi_;  // uniform in φ on [0, 2π], inclusive
  std::vector<double> fine_arc_;  // rescaled cumulative arc length, fine_arc_.back() == 2π

  std::vector<double> theta_;
  std::vector<double> phi_;  // polar angle of γ(θ_j)
  std::vector<Vec2> gamma_;
  std::vector<Vec2> tangent_;
  std::vector<double> alpha_;
  std::vector<double> alpha_prime_;
};

struct PowerTypeSample {
  double separation = 0.0;  ///< ‖x − y‖ of the worst pair
  double gap = 0.0;         ///< min 1 − ‖(x + y)/2‖ over base points
};

struct PowerTypeEstimate {
  double exponent = 0.0;  ///< fitted p̂
  double constant = 0.0;  ///< fitted K
  std::vector<PowerTypeSample> samples;
};

/// Least-squares fit of log(1 − ‖(x+y)/2‖) against log‖x − y‖ over dyadic
/// separations, taking for each separation the worst (smallest) gap over
/// `sample_count` centred boundary pairs. Requires sample_count ≥ 100.
PowerTypeEstimate power_type_estimate(const BoundaryParam& bp, int sample_count);

}  // namespace anisoag
