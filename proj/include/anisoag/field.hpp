#pragma once
/**
 * @file field.hpp
 * @brief Divergence-free fields m = ∇⊥u on a uniform grid and the
 *        experiments run on them: the energy I_ε and its minimization, entropy
 *        productions, the difference-quotient functional and the kinetic residual.
 *
 * u lives on the (nx+1)×(ny+1) nodes, m on the nx×ny cell centres with
 * m = (−∂₂u, ∂₁u) from the four corner values. Divergences of cell quantities
 * are taken at interior nodes with the matching stencil, so the divergence of
 * m vanishes identically.
 */
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "anisoag/costs.hpp"
#include "anisoag/entropy.hpp"
#include "anisoag/profile.hpp"

namespace anisoag {

struct GridSpec {
  int nx = 64;
  int ny = 64;
  double h = 1.0 / 64;
  double eps = 8.0 / 64;
  Vec2 origin{0.0, 0.0};

  /// n×n cells on the unit square with ε = cells_per_eps·h.
  static GridSpec unit_square(int n, double cells_per_eps);
};

class GridField {
 public:
  explicit GridField(const GridSpec& g);

  const GridSpec& grid() const { return g_; }
  int nx() const { return g_.nx; }
  int ny() const { return g_.ny; }
  double h() const { return g_.h; }
  double eps() const { return g_.eps; }
  void set_eps(double eps);

  int node_index(int i, int j) const { return j * (g_.nx + 1) + i; }
  int cell_index(int i, int j) const { return j * g_.nx + i; }
  Vec2 node_pos(int i, int j) const { return g_.origin + Vec2{i * g_.h, j * g_.h}; }
  Vec2 cell_center(int i, int j) const { return g_.origin + Vec2{(i + 0.5) * g_.h, (j + 0.5) * g_.h}; }
  bool is_boundary_node(int i, int j) const { return i == 0 || j == 0 || i == g_.nx || j == g_.ny; }

  const std::vector<double>& u() const { return u_; }
  double u(int i, int j) const { return u_[node_index(i, j)]; }
  /// Replacing u recomputes every m; setting a node recomputes its four cells.
  void set_u(std::vector<double> u);
  void set_node(int i, int j, double value);

  const std::vector<Vec2>& m() const { return m_; }
  Vec2 m(int i, int j) const { return m_[cell_index(i, j)]; }

  /// Binary layout: nx, ny (uint64), h, ε (float64), then u row-major; little-endian.
  void write_binary(std::ostream& os) const;
  static GridField read_binary(std::istream& is);
  /// CSV with columns i,j,x,y,m1,m2 per cell.
  void write_csv(std::ostream& os) const;

 private:
  void update_cell(int i, int j);

  GridSpec g_;
  std::vector<double> u_;
  std::vector<Vec2> m_;
};

/// Divergence at the interior nodes (row-major, (nx−1)×(ny−1)) of a cell-centred vector field.
std::vector<double> node_divergence(const GridField& f, const std::vector<Vec2>& cell_values);
/// Gradient at the interior nodes of a cell-centred scalar.
std::vector<Vec2> node_gradient(const GridField& f, const std::vector<double>& cell_values);

/// u = z₂x₁ − z₁x₂, so m ≡ z.
GridField constant_field(const GridSpec& g, Vec2 z);
/// Sharp two-state field: m = z⁺ where (x − p)·n > 0 and z⁻ elsewhere. Throws
/// std::invalid_argument unless (z⁺ − z⁻)·n = 0, which divergence-freeness requires.
GridField jump_field(const GridSpec& g, Vec2 z_plus, Vec2 z_minus, Vec2 p, Vec2 n);
/// Pastes the profile across the line through p with normal ν of its jump:
/// m(x) = aν + ζ(s/ε) iν with s = (x − p)·ν.
GridField profile_jump_field(const GridSpec& g, const Profile& prof, Vec2 p);
/// u = β‖i(x − x₀)‖_* with a quadratic cap below `core` (core = 0: no smoothing).
GridField vortex_field(const BoundaryParam& bp, const GridSpec& g, Vec2 x0, int sign, double core);
GridField potential_field(const GridSpec& g, const std::function<double(Vec2)>& u);

/// m = β V_B(i(x − x₀)), the exact vortex.
Vec2 vortex_exact(const BoundaryParam& bp, Vec2 x, Vec2 x0, int sign);

struct EnergyParts {
  double potential = 0.0;  ///< Σ (h²/ε)(1 − ‖m‖²)² over cells
  double gradient = 0.0;   ///< ε Σ |m_c − m_c'|² over neighbouring cells
  double total() const { return potential + gradient; }
};

EnergyParts energy_parts(const BoundaryParam& bp, const GridField& f, int jobs = 1);
double energy(const BoundaryParam& bp, const GridField& f, int jobs = 1);
/// ∂E/∂u at every node (boundary entries included).
std::vector<double> energy_gradient(const BoundaryParam& bp, const GridField& f, int jobs = 1);

struct MinimizeOptions {
  int max_iter = 2000;
  double tol = 1e-10;  ///< stop when the relative decrease of one step falls below tol
  int history = 8;
  int jobs = 1;
};

struct MinimizeResult {
  GridField field;
  std::vector<double> energies;  ///< after each accepted step, starting with the initial energy
  int iterations = 0;
  bool converged = false;
  std::string reason;
};

/// L-BFGS on the interior nodes with a backtracking line search; the boundary
/// values of u stay fixed and the energy never increases. Throws NumericalError
/// naming the cell if a non-finite energy density appears.
MinimizeResult minimize(const BoundaryParam& bp, GridField f, const MinimizeOptions& opt = {});

struct ProductionMeasure {
  int nx = 0;  ///< interior node counts
  int ny = 0;
  double h = 0.0;
  std::vector<double> values;  ///< discrete ∇·Φ(m) at interior nodes
  double total_variation = 0.0;
  double signed_total = 0.0;
  std::vector<unsigned char> support;  ///< |value| above 1e-9 of the largest
};

/// Φ(m) from an entropy on ∂B; throws std::invalid_argument if some |‖m‖ − 1| > 1e-6
/// (use the extended form there).
ProductionMeasure entropy_production(const GridField& f, const EntropyFn& e);
ProductionMeasure entropy_production(const GridField& f, const ExtendedEntropy& e);

/// ∇·Φ̂(m) − ½Ψ(m)·∇(1 − ‖m‖²) at the interior nodes.
std::vector<double> extended_identity_residual(const GridField& f, const ExtendedEntropy& e);

struct CellRect {
  int i0 = 0;
  int j0 = 0;
  int i1 = 0;  ///< exclusive
  int j1 = 0;
};

/// (1/|d|) Σ_{c ∈ sub} Π(m(c + d), m(c)) h² for the cell offset d = (di, dj)·h.
/// Throws std::invalid_argument if the shifted subdomain leaves the grid.
double besov_functional(const BoundaryParam& bp, const GridField& f, int di, int dj, const CellRect& sub);

/// ζ(x) = (1 − |x − c|²/r²)³ inside the disc, 0 outside.
struct TestFunction {
  Vec2 center;
  double radius = 0.1;
  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
};

struct KineticResult {
  double value = 0.0;         ///< Σ 1_{m·iγ(t)>0} γ'(t)·∇ζ h²
  double norm_defect = 0.0;   ///< max |‖m‖ − 1| on the support of ζ
};

KineticResult kinetic_residual(const BoundaryParam& bp, const GridField& f, double t, const TestFunction& z);

struct VortexDecayRow {
  double eps = 0.0;
  double h = 0.0;
  int n = 0;
  double energy = 0.0;
};

struct VortexDecay {
  std::vector<VortexDecayRow> rows;
  bool strictly_decreasing = false;
  double fit_c = 0.0;             ///< least-squares C in I ≈ C ε log(1/ε)
  double fit_rel_residual = 0.0;  ///< rms relative misfit
};

/// Energies of the vortex at the centre of the unit square, core = ε, h = ε/cells_per_eps.
VortexDecay vortex_decay_study(const BoundaryParam& bp, const std::vector<double>& eps_list,
                               double cells_per_eps = 8.0, int jobs = 1);

}  // namespace anisoag
