#include "pmr/oscillator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pmr/constants.hpp"
#include "pmr/errors.hpp"

namespace pmr {

namespace {

void check_order(int n) {
  if (n < 0) throw InvalidParameter("n", "order must be nonnegative");
  if (n > kMaxHermiteOrder) throw InvalidParameter("n", "order too large (max " + std::to_string(kMaxHermiteOrder) + ")");
}

}  // namespace

double hermite(int n, double xi) {
  check_order(n);
  if (!std::isfinite(xi)) throw InvalidParameter("xi", "must be finite");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * xi;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * xi * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_function(int n, double xi) {
  check_order(n);
  if (!std::isfinite(xi)) throw InvalidParameter("xi", "must be finite");
  // h_0 = pi^-1/4 e^{-xi²/2};  h_{k+1} = sqrt(2/(k+1)) xi h_k - sqrt(k/(k+1)) h_{k-1}
  double prev = std::exp(-0.5 * xi * xi) / std::sqrt(std::sqrt(std::numbers::pi));
  if (n == 0) return prev;
  double cur = std::sqrt(2.0) * xi * prev;
  for (int k = 1; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * xi * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double oscillator_wavefunction(int n, double omega, double mass, double x) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidParameter("omega", "invalid system: omega must be > 0");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidParameter("mass", "invalid system: mass must be > 0");
  const double inv_length = std::sqrt(mass * omega / constants::hbar);
  return std::sqrt(inv_length) * hermite_function(n, inv_length * x);
}

}  // namespace pmr
