#include "pmr/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "pmr/errors.hpp"

namespace pmr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxInverseIterations = 12;

void check_shape(std::span<const double> diag, std::span<const double> off) {
  if (diag.empty()) throw InvalidParameter("matrix", "empty matrix");
  if (off.size() + 1 != diag.size()) throw InvalidParameter("matrix", "off-diagonal length must be n-1");
}

double pivot_floor(std::span<const double> off) {
  double emax = 1.0;
  for (const double e : off) emax = std::max(emax, e * e);
  return std::numeric_limits<double>::min() * emax;
}

int count_below(std::span<const double> diag, std::span<const double> off, double x, double pivmin) {
  int count = 0;
  double q = diag[0] - x;
  if (std::abs(q) <= pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    q = diag[i] - x - off[i - 1] * off[i - 1] / q;
    if (std::abs(q) <= pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

// LU factorization with partial pivoting of a (non-symmetric after pivoting)
// tridiagonal matrix, laid out as in LAPACK's gttrf.
struct TridiagonalLU {
  std::vector<double> dl, d, du, du2;
  std::vector<std::uint8_t> swapped;

  TridiagonalLU(std::span<const double> diag, std::span<const double> off, double shift, double tiny)
      : dl(off.begin(), off.end()), d(diag.size()), du(off.begin(), off.end()),
        du2(diag.size() > 2 ? diag.size() - 2 : 0, 0.0), swapped(diag.size(), 0) {
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - shift;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = tiny;
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t i = n - 2; i-- > 0;) b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
};

double norm2(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

void scale(std::vector<double>& v, double s) {
  for (double& x : v) x *= s;
}

std::vector<double> start_vector(std::size_t n, int index) {
  // Fixed-seed LCG: deterministic and not orthogonal to any eigenvector in practice.
  std::uint64_t state = 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(index + 1);
  std::vector<double> v(n);
  for (double& x : v) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    x = static_cast<double>(state >> 11) / static_cast<double>(1ull << 53) - 0.5;
  }
  scale(v, 1.0 / norm2(v));
  return v;
}

}  // namespace

int sturm_count(std::span<const double> diag, std::span<const double> off, double x) {
  check_shape(diag, off);
  return count_below(diag, off, x, pivot_floor(off));
}

std::pair<double, double> gerschgorin_interval(std::span<const double> diag, std::span<const double> off) {
  check_shape(diag, off);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const std::size_t n = diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  // widen so the endpoints are strict bounds under rounding
  const double pad = 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + std::numeric_limits<double>::min();
  return {lo - pad, hi + pad};
}

std::vector<double> lowest_eigenvalues(std::span<const double> diag, std::span<const double> off, int k,
                                       double tol) {
  check_shape(diag, off);
  if (k < 1 || static_cast<std::size_t>(k) > diag.size()) throw InvalidParameter("k", "must satisfy 1 <= k <= n");
  if (!(tol > 0.0)) throw InvalidParameter("tol", "must be > 0");

  const double pivmin = pivot_floor(off);
  const auto [glo, ghi] = gerschgorin_interval(diag, off);
  std::vector<double> lower(k, glo), upper(k, ghi), values(k);

  for (int j = 0; j < k; ++j) {
    double lo = lower[j];
    double hi = upper[j];
    while (true) {
      const double mid = 0.5 * (lo + hi);
      const double width_floor = 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + pivmin;
      if (hi - lo <= std::max(tol, width_floor) || mid <= lo || mid >= hi) break;
      const int c = count_below(diag, off, mid, pivmin);
      if (c > j) {
        hi = mid;
        for (int jj = j + 1; jj < std::min(c, k); ++jj) upper[jj] = std::min(upper[jj], mid);
      } else {
        lo = mid;
        for (int jj = j + 1; jj < k; ++jj) lower[jj] = std::max(lower[jj], mid);
      }
    }
    values[j] = 0.5 * (lo + hi);
    for (int jj = j + 1; jj < k; ++jj) lower[jj] = std::max(lower[jj], lo);
  }
  return values;
}

std::vector<Eigenpair> lowest_eigenpairs(std::span<const double> diag, std::span<const double> off, int k,
                                         double tol, double weight) {
  if (!(weight > 0.0)) throw InvalidParameter("weight", "quadrature weight must be > 0");
  const auto values = lowest_eigenvalues(diag, off, k, tol);
  const std::size_t n = diag.size();

  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    norm = std::max(norm, std::abs(diag[i]) + (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0));
  }
  const double tiny = kEps * std::max(norm, std::numeric_limits<double>::min());

  std::vector<Eigenpair> pairs;
  pairs.reserve(k);
  for (int j = 0; j < k; ++j) {
    const TridiagonalLU lu(diag, off, values[j], tiny);
    std::vector<double> x = start_vector(n, j);
    bool converged = false;
    for (int it = 0; it < kMaxInverseIterations && !converged; ++it) {
      std::vector<double> y = x;
      lu.solve(y);
      for (const auto& prev : pairs) {
        const double proj = std::inner_product(y.begin(), y.end(), prev.vector.begin(), 0.0) * weight;
        for (std::size_t i = 0; i < n; ++i) y[i] -= proj * prev.vector[i];
      }
      const double ny = norm2(y);
      if (!(ny > 0.0) || !std::isfinite(ny)) break;
      scale(y, 1.0 / ny);
      const double overlap = std::abs(std::inner_product(y.begin(), y.end(), x.begin(), 0.0));
      converged = it > 0 && overlap > 1.0 - 1e-13;
      x = std::move(y);
    }
    if (!converged) throw ConvergenceError("eigenvector not converged (index " + std::to_string(j) + ")");

    const auto peak = std::max_element(x.begin(), x.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    scale(x, (*peak < 0.0 ? -1.0 : 1.0) / std::sqrt(weight));
    pairs.push_back({values[j], std::move(x)});
  }
  return pairs;
}

}  // namespace pmr
