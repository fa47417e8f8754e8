#pragma once

// Symmetric tridiagonal eigensolver for the lowest part of the spectrum:
// Sturm-sequence bisection for eigenvalues, inverse iteration for vectors.

#include <span>
#include <utility>
#include <vector>

namespace pmr {

struct Eigenpair {
  double value = 0.0;
  std::vector<double> vector;
};

/// Number of eigenvalues strictly below x. `off` has diag.size() - 1 entries.
int sturm_count(std::span<const double> diag, std::span<const double> off, double x);

std::pair<double, double> gerschgorin_interval(std::span<const double> diag, std::span<const double> off);

/// The k smallest eigenvalues, ascending, each bracketed to width <= tol
/// (or to the floating-point resolution of the bracket, whichever is larger).
std::vector<double> lowest_eigenvalues(std::span<const double> diag, std::span<const double> off, int k,
                                       double tol);

/// The k smallest eigenpairs. Vectors satisfy sum_i v_i² * weight = 1 and
/// have their largest-magnitude component positive.
/// Throws ConvergenceError("eigenvector not converged") if inverse iteration
/// stalls.
std::vector<Eigenpair> lowest_eigenpairs(std::span<const double> diag, std::span<const double> off, int k,
                                         double tol, double weight = 1.0);

}  // namespace pmr
