#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace pmr {

/// Exact half-integer (spin quantum number or spin projection), stored as
/// twice its value.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;

  static constexpr HalfInteger from_twice(int twice) noexcept {
    HalfInteger h;
    h.twice_ = twice;
    return h;
  }

  /// Throws InvalidParameter when 2·value is not an integer.
  static HalfInteger from_value(double value, const std::string& parameter = "M");

  constexpr int twice() const noexcept { return twice_; }
  constexpr double value() const noexcept { return twice_ / 2.0; }
  constexpr bool is_zero() const noexcept { return twice_ == 0; }

  constexpr HalfInteger operator-() const noexcept { return from_twice(-twice_); }
  constexpr HalfInteger next() const noexcept { return from_twice(twice_ + 2); }

  /// Decimal rendering with one fractional digit ("-1.5", "0.0", "2.5").
  std::string to_string() const;

  constexpr auto operator<=>(const HalfInteger&) const = default;

 private:
  int twice_ = 0;
};

using SpinProjection = HalfInteger;

struct SpinSystem {
  double mass = 0.0;   // kg
  double gamma = 0.0;  // rad·s⁻¹·T⁻¹, signed
  HalfInteger spin;    // S ≥ 0
  double omega = 0.0;  // rad·s⁻¹
  double offset = 0.0; // potential minimum a, m
  std::optional<double> sample_half_length;  // ℓ, m; only bounds |offset|

  /// Throws InvalidParameter naming the first violated field.
  void validate() const;

  bool admits(SpinProjection m) const noexcept;

  /// Projections -S, -S+1, ..., S in ascending order.
  std::vector<SpinProjection> projections() const;
};

struct FieldProfile {
  double b0 = 0.0;    // T
  double g = 0.0;     // T·m⁻¹
  double gbar = 0.0;  // T·m⁻²

  void validate() const;
  bool homogeneous() const noexcept { return g == 0.0 && gbar == 0.0; }
};

/// (M, n) label of one spin-oscillator eigenstate.
struct LevelLabel {
  SpinProjection m;
  int n = 0;

  constexpr auto operator<=>(const LevelLabel&) const = default;
};

struct EnergyLevel {
  SpinProjection m;
  int n = 0;
  double energy = 0.0;  // J
};

/// Closed-form energy split into its three additive pieces, in J:
/// oscillator ħΩ̃_M(n+½), Zeeman -γB(a)ħM and the gradient shift
/// -γ²(G+2Ḡa)²ħ²M²/(2mΩ̃_M²).
struct EnergyTerms {
  double oscillator = 0.0;
  double zeeman = 0.0;
  double shift = 0.0;

  double total() const noexcept { return oscillator + zeeman + shift; }
};

/// Quantum/classical split of the level energy for B₀ = 0, Ḡ ≠ 0.
struct EnergyDecomposition {
  double quantum_term = 0.0;          // ħΩ(n+½)√(1-M̄)
  double classical_g_term = 0.0;      // -(mΩ²(G/Ḡ)a/2)·M̄/(1-M̄)
  double classical_a_term = 0.0;      // -(mΩ²a²/2)·M̄/(1-M̄)
  double classical_mixed_term = 0.0;  // -(mΩ²(G/Ḡ)²/2)·M̄²/(4(1-M̄))
  double total = 0.0;
};

/// Per-sector derived quantities. omega_eff and center are NaN when the
/// sector is not stable.
struct DerivedParams {
  double mbar = 0.0;
  double omega_eff = 0.0;
  double center = 0.0;
  double gbar_crit = 0.0;
  bool stable = true;
};

struct StabilityReport {
  double gbar_crit = 0.0;  // T·m⁻²; +inf when S = 0 or γ = 0
  bool stable = true;
  SpinProjection worst_m;  // projection with the largest M̄
  double worst_mbar = 0.0;
};

}  // namespace pmr
