#include "pmr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmr/constants.hpp"
#include "pmr/errors.hpp"
#include "pmr/parallel.hpp"
#include "pmr/spectrum.hpp"

namespace pmr {

namespace {

// Richardson/Romberg table over nested grids with spacing halved each step;
// the 3-point Laplacian eigenvalue error expands in even powers of du.
class Romberg {
 public:
  explicit Romberg(std::size_t levels) : rows_(levels) {}

  std::vector<double> push(const std::vector<double>& raw) {
    for (std::size_t l = 0; l < rows_.size(); ++l) {
      auto& rows = rows_[l];
      std::vector<double> row{raw[l]};
      if (!rows.empty()) {
        const auto& prev = rows.back();
        double factor = 1.0;
        for (std::size_t i = 1; i <= prev.size(); ++i) {
          factor *= 4.0;
          row.push_back(row[i - 1] + (row[i - 1] - prev[i - 1]) / (factor - 1.0));
        }
      }
      rows.push_back(std::move(row));
    }
    std::vector<double> best(rows_.size());
    for (std::size_t l = 0; l < rows_.size(); ++l) best[l] = rows_[l].back().back();
    return best;
  }

 private:
  std::vector<std::vector<std::vector<double>>> rows_;
};

}  // namespace

void Grid::validate() const {
  if (!(std::isfinite(u_min) && std::isfinite(u_max) && u_min < u_max) || n_points < kMinPoints) {
    throw InvalidParameter("grid", "grid too coarse (need u_min < u_max and n_points >= " +
                                       std::to_string(kMinPoints) + ")");
  }
  if (!(length_unit > 0.0)) throw InvalidParameter("grid", "length unit must be > 0");
}

SectorPotential sector_potential(const SpinSystem& sys, const FieldProfile& field, SpinProjection m) {
  sys.validate();
  field.validate();
  if (!sys.admits(m)) throw InvalidParameter("M", "projection " + m.to_string() + " not allowed");
  const double lambda = std::sqrt(constants::hbar / (sys.mass * sys.omega));
  const double alpha = sys.offset / lambda;
  // gamma*M*B/Omega is the Zeeman energy over hbar*Omega for field B.
  const double coupling = sys.gamma * m.value() / sys.omega;
  SectorPotential p;
  p.length_unit = lambda;
  p.c2 = 0.5 - coupling * field.gbar * lambda * lambda;
  p.c1 = -alpha - coupling * field.g * lambda;
  p.c0 = 0.5 * alpha * alpha - coupling * field.b0;
  return p;
}

SectorMatrix build_sector_hamiltonian(const SpinSystem& sys, const FieldProfile& field, SpinProjection m,
                                      const Grid& grid) {
  grid.validate();
  const auto p = sector_potential(sys, field, m);

  // Evaluate the quadratic about a reference point near the well so that the
  // large constant parts cancel once rather than at every node.
  const double ref = p.bounded_below() ? p.vertex() : 0.5 * (grid.u_min + grid.u_max);
  const double d1 = 2.0 * p.c2 * ref + p.c1;
  const double d0 = p(ref);
  const double h = grid.spacing();
  const double s0 = grid.u_min - ref;
  const double kinetic = 1.0 / (h * h);

  SectorMatrix mat;
  mat.m = m;
  mat.grid = grid;
  mat.grid.length_unit = p.length_unit;
  mat.diagonal.resize(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double s = s0 + i * h;
    mat.diagonal[i] = kinetic + ((p.c2 * s + d1) * s + d0);
  }
  mat.off_diagonal.assign(grid.n_points - 1, -0.5 * kinetic);
  return mat;
}

std::vector<Eigenpair> lowest_eigenpairs(const SectorMatrix& mat, int k, double tol) {
  return lowest_eigenpairs(mat.diagonal, mat.off_diagonal, k, tol, mat.grid.spacing());
}

double expectation_position(std::span<const double> vec, const Grid& grid) {
  if (vec.size() != static_cast<std::size_t>(grid.n_points)) throw InvalidParameter("vec", "length must match grid");
  const double h = grid.spacing();
  double sum = 0.0;
  for (int i = 0; i < grid.n_points; ++i) sum += grid.node(i) * vec[i] * vec[i];
  return sum * h * grid.length_unit;
}

OracleSpectrum converged_spectrum(const SpinSystem& sys, const FieldProfile& field, SpinProjection m, int k,
                                  double tol, const OracleOptions& options) {
  if (k < 1) throw InvalidParameter("k", "must be >= 1");
  if (!(tol >= 1e-12)) throw InvalidParameter("tol", "must be >= 1e-12");
  const auto p = sector_potential(sys, field, m);
  if (!p.bounded_below()) {
    throw DissociationError(m, 1.0 - 2.0 * p.c2, "unbounded below: no discrete spectrum guaranteed");
  }

  // Effective oscillator length of the sector, in units of lambda.
  const double curvature = 2.0 * p.c2;
  const double length = 1.0 / std::sqrt(std::sqrt(curvature));
  const double energy_floor = 0.5 * std::sqrt(curvature);
  const double center = p.vertex();
  const double half_width = (std::sqrt(2.0 * k + 1.0) + 9.0) * length;

  OracleSpectrum out;
  out.m = m;
  Grid grid;
  grid.u_min = center - half_width;
  // Slightly lopsided so the nodes are not mirror-symmetric about the well.
  grid.u_max = center + 1.0625 * half_width;
  grid.length_unit = p.length_unit;
  const int intervals0 = std::max(
      Grid::kMinPoints, static_cast<int>(std::ceil((grid.u_max - grid.u_min) / (options.base_spacing * length))));

  Romberg table(k);
  std::vector<double> previous;
  std::vector<double> ground_raw;
  for (int step = 0;; ++step) {
    const long long intervals = static_cast<long long>(intervals0) << step;
    if (intervals + 1 > options.max_points) {
      throw ConvergenceError("oracle did not converge for M=" + m.to_string() + " within " +
                             std::to_string(options.max_points) + " grid points");
    }
    grid.n_points = static_cast<int>(intervals + 1);
    const auto mat = build_sector_hamiltonian(sys, field, m, grid);
    const double bisection_tol = 1e-4 * tol * energy_floor;
    auto raw = lowest_eigenvalues(mat.diagonal, mat.off_diagonal, k, bisection_tol);
    const auto best = table.push(raw);
    ground_raw.push_back(raw[0]);
    out.history.push_back({grid.n_points, std::move(raw), best});

    if (step >= 2) {
      bool done = true;
      for (int l = 0; l < k; ++l) {
        const double scale = std::max(std::abs(best[l]), energy_floor);
        if (std::abs(best[l] - previous[l]) > 0.1 * tol * scale) done = false;
      }
      if (done) {
        out.converged = true;
        out.grid = mat.grid;
        out.energies_hbar_omega = best;
        if (options.want_vectors) {
          auto pairs = lowest_eigenpairs(mat, k, bisection_tol);
          for (auto& pair : pairs) {
            out.expected_positions.push_back(expectation_position(pair.vector, mat.grid));
            out.eigenvectors.push_back(std::move(pair.vector));
          }
        }
        break;
      }
    }
    previous = best;
  }

  const std::size_t g = ground_raw.size();
  const double d1 = ground_raw[g - 3] - ground_raw[g - 2];
  const double d2 = ground_raw[g - 2] - ground_raw[g - 1];
  out.observed_order = (d1 != 0.0 && d2 != 0.0) ? std::log2(std::abs(d1 / d2)) : 0.0;

  const double unit = constants::hbar * sys.omega;
  for (const double e : out.energies_hbar_omega) out.energies_j.push_back(e * unit);
  return out;
}

ValidationReport validate_spectrum(const SpinSystem& sys, const FieldProfile& field, int k, double tol,
                                   unsigned threads) {
  const auto projections = sys.projections();
  std::vector<OracleSpectrum> spectra(projections.size());
  OracleOptions options;
  options.want_vectors = true;
  parallel_for(projections.size(), threads,
               [&](std::size_t i) { spectra[i] = converged_spectrum(sys, field, projections[i], k, tol, options); });

  ValidationReport report;
  report.tolerance = tol;
  report.converged = true;
  for (std::size_t i = 0; i < projections.size(); ++i) {
    const auto m = projections[i];
    const auto& solved = spectra[i];
    SectorValidation sector;
    sector.m = m;
    sector.grid = solved.grid;
    sector.observed_order = solved.observed_order;
    sector.converged = solved.converged;
    sector.center_analytic_m = eigenfunction_center(sys, field, m);
    sector.center_oracle_m = solved.expected_positions.front();
    sector.history = solved.history;
    report.converged = report.converged && solved.converged;
    report.sectors.push_back(std::move(sector));

    for (int n = 0; n < k; ++n) {
      LevelComparison level;
      level.m = m;
      level.n = n;
      level.analytic_j = energy_level(sys, field, m, n);
      level.numeric_j = solved.energies_j[n];
      const double denom = level.analytic_j != 0.0 ? std::abs(level.analytic_j) : constants::hbar * sys.omega;
      level.relative_error = std::abs(level.numeric_j - level.analytic_j) / denom;
      report.max_relative_error = std::max(report.max_relative_error, level.relative_error);
      report.levels.push_back(level);
    }
  }
  return report;
}

}  // namespace pmr
