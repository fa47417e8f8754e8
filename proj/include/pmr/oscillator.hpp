#pragma once

namespace pmr {

inline constexpr int kMaxHermiteOrder = 200;

/// Physicists' Hermite polynomial H_n(xi) by upward three-term recurrence.
/// Throws InvalidParameter("n") for n < 0 or n > kMaxHermiteOrder.
double hermite(int n, double xi);

/// Normalized Hermite function h_n(xi) = H_n(xi) exp(-xi²/2) / sqrt(2^n n! sqrt(pi)),
/// built from its own recurrence so no factorial is ever formed.
double hermite_function(int n, double xi);

/// Normalized eigenfunction of the free oscillator of frequency omega (rad/s)
/// and mass (kg) at displacement x (m); units m^-1/2.
double oscillator_wavefunction(int n, double omega, double mass, double x);

}  // namespace pmr
