#pragma once

// Independent numerical check of the closed-form spectrum: each spin sector
// Hamiltonian is discretized with a 3-point Laplacian on a uniform grid
// (hard walls) and diagonalized with the tridiagonal solver. Eigenvalues are
// extrapolated to zero spacing over a sequence of nested grids.
//
// Internally everything is dimensionless: energies in units of hbar*Omega,
// lengths in units of lambda = sqrt(hbar / (m Omega)).

#include <span>
#include <vector>

#include "pmr/tridiagonal.hpp"
#include "pmr/types.hpp"

namespace pmr {

/// Uniform grid of n_points nodes u_min, ..., u_max (dimensionless u = x / length_unit).
/// Dirichlet walls sit one spacing outside each end.
struct Grid {
  double u_min = 0.0;
  double u_max = 0.0;
  int n_points = 0;
  double length_unit = 1.0;  // m per unit of u

  static constexpr int kMinPoints = 64;

  /// Throws InvalidParameter("grid", "grid too coarse") when degenerate.
  void validate() const;
  double spacing() const noexcept { return (u_max - u_min) / (n_points - 1); }
  double node(int i) const noexcept { return u_min + i * spacing(); }
};

struct SectorMatrix {
  std::vector<double> diagonal;      // units of hbar*Omega
  std::vector<double> off_diagonal;  // all equal to -1/(2 du²)
  SpinProjection m;
  Grid grid;
};

/// Dimensionless sector potential V_M(lambda u) / (hbar Omega) written as a
/// quadratic c2 u² + c1 u + c0, straight from
/// m Omega² (x-a)²/2 - gamma hbar M (B0 + G x + Gbar x²).
struct SectorPotential {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double length_unit = 1.0;  // lambda, m

  double operator()(double u) const noexcept { return (c2 * u + c1) * u + c0; }
  bool bounded_below() const noexcept { return c2 > 0.0; }
  /// Minimum of the quadratic; meaningful only when bounded_below().
  double vertex() const noexcept { return -c1 / (2.0 * c2); }
};

SectorPotential sector_potential(const SpinSystem& sys, const FieldProfile& field, SpinProjection m);

SectorMatrix build_sector_hamiltonian(const SpinSystem& sys, const FieldProfile& field, SpinProjection m,
                                      const Grid& grid);

/// Lowest k eigenpairs of a sector matrix; vectors normalized under the grid
/// quadrature weight (sum psi_i² du = 1, dimensionless).
std::vector<Eigenpair> lowest_eigenpairs(const SectorMatrix& mat, int k, double tol);

/// <x> = sum x_i |psi_i|² dx in metres, for a vector normalized on `grid`
/// in dimensionless units.
double expectation_position(std::span<const double> vec, const Grid& grid);

struct RefinementStep {
  int n_points = 0;
  std::vector<double> raw;           // finite-difference eigenvalues, hbar*Omega
  std::vector<double> extrapolated;  // Richardson estimate after this step
};

struct OracleSpectrum {
  SpinProjection m;
  Grid grid;  // finest grid used
  std::vector<double> energies_hbar_omega;
  std::vector<double> energies_j;
  std::vector<RefinementStep> history;
  /// Observed convergence order p of the raw ground-state eigenvalue, from
  /// the last three grids (error ~ du^p, expected p ≈ 2).
  double observed_order = 0.0;
  bool converged = false;
  /// Eigenvectors on the finest grid (only when requested).
  std::vector<std::vector<double>> eigenvectors;
  /// <x> of each returned eigenvector, metres (only when requested).
  std::vector<double> expected_positions;
};

struct OracleOptions {
  double base_spacing = 0.25;  // initial du in units of the sector's effective length
  int max_points = (1 << 18) + 1;
  bool want_vectors = false;
};

/// Converged lowest-k sector spectrum. Refines the grid by factors of two
/// until successive Richardson estimates change every eigenvalue by less
/// than 0.1*tol relative to max(|E|, hbar*Omega_M/2).
/// Throws DissociationError for an unbounded sector and ConvergenceError
/// when the point cap is reached first.
OracleSpectrum converged_spectrum(const SpinSystem& sys, const FieldProfile& field, SpinProjection m, int k,
                                  double tol, const OracleOptions& options = {});

struct LevelComparison {
  SpinProjection m;
  int n = 0;
  double analytic_j = 0.0;
  double numeric_j = 0.0;
  double relative_error = 0.0;
};

struct SectorValidation {
  SpinProjection m;
  Grid grid;
  double observed_order = 0.0;
  bool converged = false;
  double center_analytic_m = 0.0;
  double center_oracle_m = 0.0;
  std::vector<RefinementStep> history;
};

struct ValidationReport {
  double tolerance = 0.0;
  std::vector<LevelComparison> levels;
  std::vector<SectorValidation> sectors;
  bool converged = false;
  double max_relative_error = 0.0;

  bool passed() const noexcept { return converged && max_relative_error < tolerance; }
};

/// Compares the closed-form E_{M,n}, n < k, against the oracle for every
/// projection M. Sectors are solved on up to `threads` workers (0 = one per
/// hardware thread); results are ordered by M regardless.
ValidationReport validate_spectrum(const SpinSystem& sys, const FieldProfile& field, int k, double tol,
                                   unsigned threads = 1);

}  // namespace pmr
