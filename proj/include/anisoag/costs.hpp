#pragma once
/**
 * @file costs.hpp
 * @brief Jump costs c^1D, c^ENT and Π between two points of ∂B, and the
 *        regularity functionals Δ_φ and ω.
 *
 * All costs refer to the rescaled norm of the BoundaryParam. For an input norm
 * N with rescale factor κ (rescaled norm N/κ), the costs of N itself are
 * c^1D/κ, c^ENT/κ² and Π/κ².
 */

#include <optional>
#include <string>
#include <vector>

#include "anisoag/boundary.hpp"
#include "json.hpp"

namespace anisoag {

/// Two distinct points z± = γ(θ±) of ∂B with ν = i(z⁺−z⁻)/|z⁺−z⁻| and a = z±·ν.
/// θ⁺ − θ⁻ lies in (−π, π]; its absolute value is the distance along ∂B.
/// The sign of ν gives z⁺·iν < z⁻·iν.
struct JumpPair {
  Vec2 z_plus;
  Vec2 z_minus;
  double theta_plus = 0.0;
  double theta_minus = 0.0;
  Vec2 nu;
  double a = 0.0;
  /// Root of γ'·ν strictly between θ⁻ and θ⁺; absent for antipodal pairs.
  std::optional<double> theta_tilde;
  bool antipodal = false;

  double lo() const { return std::min(theta_minus, theta_plus); }
  double hi() const { return std::max(theta_minus, theta_plus); }
  double width() const { return hi() - lo(); }
};

/// Throws std::invalid_argument if z⁺ = z⁻ or a point is off ∂B.
JumpPair make_jump(const BoundaryParam& bp, Vec2 z_plus, Vec2 z_minus);
JumpPair make_jump_theta(const BoundaryParam& bp, double theta_plus, double theta_minus);

/// 2|∫_{z⁻·iν}^{z⁺·iν} (1 − ‖aν + s iν‖²) ds|.
double c1d(const BoundaryParam& bp, const JumpPair& jp);

/// |∫_{θ⁻}^{θ⁺} (θ − θ̃)(γ'(θ)·ν) dθ| for jumps narrower than π/2; throws
/// std::invalid_argument for wider jumps (use cent_lp).
double cent_explicit(const BoundaryParam& bp, const JumpPair& jp);
/// The same quantity written as |∫ (a − γ(θ)·ν) dθ|, used as a cross-check.
double cent_support_form(const BoundaryParam& bp, const JumpPair& jp);

struct CentLpResult {
  double value = 0.0;
  std::vector<double> lambda;  ///< optimal λ on the n-node grid, λ₀ = 0
  int iterations = 0;
};

/// Discretized sup over {λ: ∫λγ' = 0, |λ'| ≤ 1} of ∫_{θ⁻}^{θ⁺} λγ'·ν, with λ
/// piecewise linear on n ≥ 128 nodes. Throws NumericalError if the solver stalls.
CentLpResult cent_lp(const BoundaryParam& bp, const JumpPair& jp, int n);

struct PiResult {
  double value = 0.0;   ///< ∬|α(t) − α(s)|, tensor midpoint rule with Richardson step
  double single = 0.0;  ///< 2∫(τ − θ₁)(θ₂ − τ) α'(τ) dτ against the α' density
  bool mismatch = false;  ///< the two differ by more than 1%
};

/// Π(γ(θ₁), γ(θ₂)); pairs farther apart than π are reduced to the geodesic representative.
PiResult pi_cost(const BoundaryParam& bp, double theta1, double theta2);
/// Π via 2∫α(t)(2t − θ₁ − θ₂) dt, exact for the piecewise-linear α.
double pi_fast(const BoundaryParam& bp, double theta1, double theta2);

/// Δ_φ(m₁, m₂) for the step kernel of width δ ∈ (0, π/2); m₁, m₂ are euclidean unit vectors.
double delta_phi(const BoundaryParam& bp, Vec2 m1, Vec2 m2, double delta);
/// Λ(m₁, m₂) = Π(γ(θ₁), γ(θ₂)) with m_k = e^{iθ_k}.
double lambda_circle(const BoundaryParam& bp, Vec2 m1, Vec2 m2);

/// ω(δ) = sup{|α⁻¹(t) − α⁻¹(s)| : |t − s| < δ}.
double omega_modulus(const BoundaryParam& bp, double delta);
/// Smallest δ with ω(δ) ≥ y.
double omega_inverse(const BoundaryParam& bp, double y);
/// Λ(m₁,m₂) / (δ² ω⁻¹(δ/2)) with δ = |m₁ − m₂|.
double modulus_ratio(const BoundaryParam& bp, Vec2 m1, Vec2 m2);
/// Λ(m₁,m₂) ≥ c δ² ω⁻¹(δ/2).
bool check_modulus_bound(const BoundaryParam& bp, Vec2 m1, Vec2 m2, double c);

struct CostReport {
  double c1d = 0.0;
  std::optional<double> cent_explicit;
  double cent_lp = 0.0;
  double cent = 0.0;  ///< explicit value when available, LP otherwise
  double pi = 0.0;
  bool pi_mismatch = false;
  double ratio_c1d_cent = 0.0;
  double ratio_cent_pi = 0.0;
};

CostReport cost_report(const BoundaryParam& bp, const JumpPair& jp, int lp_nodes);
nlohmann::json to_json(const CostReport& r);

struct BoundsOptions {
  int base_points = 64;
  int widths = 64;
  double min_width = 1e-3;
  double max_width = kPi;
  int lp_nodes = 512;
  int jobs = 1;
  int limit_points = 8;
  double limit_width = 1e-3;
};

struct PairCosts {
  double theta_minus = 0.0;
  double theta_plus = 0.0;
  double c1d = 0.0;
  double cent = 0.0;
  double pi = 0.0;
  double ratio = 0.0;
};

struct LimitSample {
  double theta = 0.0;
  double ratio = 0.0;
  double predicted_4 = 0.0;  ///< 4/|iγ'·γ|
  double predicted_2 = 0.0;  ///< 2/|iγ'·γ|
};

struct BoundsReport {
  std::vector<PairCosts> pairs;
  double ratio_sup = 0.0;
  double ratio_inf = 0.0;
  int cent_pi_violations = 0;
  double cent_pi_max_ratio = 0.0;
  std::vector<LimitSample> limit;
  double limit_err_4 = 0.0;  ///< max relative deviation from 4/|iγ'·γ|
  double limit_err_2 = 0.0;
  std::string limit_match;   ///< "4", "2" or "neither" (1% tolerance)
};

/// Scans base points × log-spaced widths; explicit c^ENT below π/2, LP at and above.
BoundsReport verify_bounds(const BoundaryParam& bp, const BoundsOptions& opt);
nlohmann::json to_json(const BoundsReport& r);

}  // namespace anisoag
