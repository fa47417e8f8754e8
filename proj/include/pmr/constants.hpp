#pragma once

#include <numbers>

namespace pmr::constants {

/// Reduced Planck constant, J·s.
inline constexpr double hbar = 1.054571817e-34;

/// Electron gyromagnetic ratio, rad·s⁻¹·T⁻¹ (negative: moment antiparallel to spin).
inline constexpr double electron_gamma = -1.76085963e11;

/// Electron rest mass, kg.
inline constexpr double electron_mass = 9.1093837015e-31;

/// Proton gyromagnetic ratio, rad·s⁻¹·T⁻¹.
inline constexpr double proton_gamma = 2.6752218744e8;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace pmr::constants
