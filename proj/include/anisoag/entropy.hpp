#pragma once
/**
 * @file entropy.hpp
 * @brief Entropies Φ with dΦ(γ(θ))/dθ = λ(θ)γ'(θ), their extensions Φ̂ to the
 *        plane and the production coefficient Ψ.
 *
 * λ is stored on its own uniform grid of n nodes and interpolated piecewise
 * linearly; Φ(γ(θ)) = ∫₀^θ λγ' is accumulated from exact per-cell moments of
 * γ', so Φ(γ(0)) = 0 and the accumulated map is consistent with the quadrature
 * used by the admissibility projection.
 */

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "anisoag/boundary.hpp"

namespace anisoag {

class EntropyFn {
 public:
  /// Accumulates Φ from λ without projecting. admissible() reports closure.
  static EntropyFn accumulate(std::shared_ptr<const BoundaryParam> bp, std::vector<double> lambda);

  const BoundaryParam& boundary() const { return *bp_; }
  std::shared_ptr<const BoundaryParam> boundary_ptr() const { return bp_; }
  int size() const { return static_cast<int>(lambda_.size()); }
  double step() const { return kTwoPi / size(); }

  const std::vector<double>& lambda_samples() const { return lambda_; }
  /// Φ(γ(θ_j)) at the nodes θ_j = j·step(), plus the closing value at 2π.
  const std::vector<Vec2>& phi_samples() const { return phi_; }
  bool admissible() const { return admissible_; }
  double lip_bound() const { return lip_bound_; }
  /// ‖μ‖_{L¹} of the correction removed by project_to_admissible (0 otherwise).
  double correction_l1() const { return correction_l1_; }

  /// λ(θ), periodic piecewise-linear.
  double lambda(double theta) const;
  /// Φ(γ(θ)); throws std::logic_error for a non-admissible entropy.
  Vec2 phi(double theta) const;
  /// Φ(z) for z on the unit circle.
  Vec2 phi_at_point(Vec2 z) const;

  /// CSV with columns theta,lambda,phix,phiy.
  void write_csv(std::ostream& os) const;

 private:
  friend EntropyFn project_to_admissible(std::shared_ptr<const BoundaryParam>, std::vector<double>);
  EntropyFn() = default;
  void rebuild();

  std::shared_ptr<const BoundaryParam> bp_;
  std::vector<double> lambda_;
  std::vector<Vec2> phi_;
  std::vector<Vec2> moment_a_;  // ∫ (1−u) γ' over cell j
  std::vector<Vec2> moment_b_;  // ∫ u γ' over cell j
  bool admissible_ = false;
  double lip_bound_ = 0.0;
  double correction_l1_ = 0.0;
};

/// Removes the unique c₁γ'₁ + c₂γ'₂ component so that ∫λγ' = 0.
/// Throws NumericalError if the Gram system is singular.
EntropyFn project_to_admissible(std::shared_ptr<const BoundaryParam> bp, std::vector<double> lambda);

/// Samples a function of θ on the uniform n-node grid.
std::vector<double> sample_lambda(const std::function<double(double)>& f, int n);

/// Unit-mass C^∞ bump supported in (0, 1).
double bump(double x);

/// Mollified Heaviside entropy at the boundary point ξ with width δ ∈ (0, π/4):
/// λ̂ = ρ_δ(θ − θ₀) + ρ_δ(π + θ₀ − θ), projected to admissibility.
/// As δ → 0, Φ(γ(θ)) − Φ(ξ) tends to 1_{θ∈(θ₀,θ₀+π)} γ'(θ₀).
EntropyFn heaviside_entropy(std::shared_ptr<const BoundaryParam> bp, Vec2 xi, double delta, int n);

/// The limit map 1_{z·iξ>0} γ'(θ₀), anchored at Φ(ξ) = 0.
Vec2 heaviside_limit(const BoundaryParam& bp, Vec2 xi, double theta);

struct HeavisideRow {
  double delta = 0.0;
  double max_error = 0.0;  ///< max |Φ(γ(θ)) − Φ(ξ) − limit| over the test points
  double mu_l1 = 0.0;      ///< correction_l1() of the projected entropy
};

/// Runs heaviside_entropy along `deltas` and compares with heaviside_limit at
/// `points` angles drawn from `seed`, all at least `margin` away from θ₀ and θ₀ + π.
std::vector<HeavisideRow> heaviside_study(std::shared_ptr<const BoundaryParam> bp, Vec2 xi,
                                          const std::vector<double>& deltas, int n, int points,
                                          double margin, unsigned seed);

/// Φ_ψ(γ(θ)) = ∫_{|s−θ|<π/2} ψ(s) γ'(s − π/2) ds.
Vec2 phi_psi(const BoundaryParam& bp, const std::function<double(double)>& psi, double theta);

/// λ(θ) = ψ(θ + π/2) + ψ(θ − π/2).
std::function<double(double)> lambda_of_psi(std::function<double(double)> psi);

/// η: C¹ piecewise cubic, 0 outside (½, 2), η(1) = 1, η'(1) = 0.
double cutoff(double r);
double cutoff_derivative(double r);

struct ExtendedValue {
  Vec2 phi_hat;
  Vec2 psi;
};

class ExtendedEntropy {
 public:
  explicit ExtendedEntropy(EntropyFn e);

  const EntropyFn& entropy() const { return e_; }
  /// Φ̂(rγ(θ)) = η(r)Φ(γ(θ)) and Ψ(rγ(θ)) = ηλ/r² γ − η'/r Φ.
  ExtendedValue eval(Vec2 z) const;

 private:
  EntropyFn e_;
};

}  // namespace anisoag
