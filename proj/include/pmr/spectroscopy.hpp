#pragma once

// Observables derived from the closed-form spectrum: transition lines,
// level crossings as a function of Gbar, quantum/classical regime weights and
// the inverse problem of recovering Omega from one level's spin sublevels.

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmr/types.hpp"

namespace pmr {

struct TransitionLine {
  LevelLabel from;
  LevelLabel to;
  double delta_e = 0.0;        // J, magnitude
  double frequency_hz = 0.0;   // delta_e / (2 pi hbar)
  double frequency_rad = 0.0;  // delta_e / hbar
};

enum class SelectionRule {
  delta_m1_fixed_n,   // (M, n) -> (M+1, n) for every M < S
  delta_n1_fixed_m,   // (M, n) -> (M, n+1) for every M
  all_pairs_within,   // every pair of levels with n <= n_max, frequency <= cutoff
};

struct LineSelection {
  SelectionRule rule = SelectionRule::delta_m1_fixed_n;
  int n = 0;
  int n_max = 0;
  double cutoff_hz = std::numeric_limits<double>::infinity();
};

/// Line between two levels.
TransitionLine make_line(const SpinSystem& sys, const FieldProfile& field, LevelLabel from, LevelLabel to);

/// Lines sorted ascending by frequency (ties by labels). Throws
/// DissociationError naming the first unstable M involved.
std::vector<TransitionLine> transition_lines(const SpinSystem& sys, const FieldProfile& field,
                                             const LineSelection& selection);

struct CrossingPoint {
  double gbar = 0.0;
  LevelLabel level_a;
  LevelLabel level_b;
  double energy = 0.0;         // J, mean of the two levels at gbar
  double bracket_width = 0.0;  // final bisection bracket, T/m²
};

struct LevelPair {
  LevelLabel a;
  LevelLabel b;
};

struct TangencyHint {
  double gbar = 0.0;
  LevelLabel level_a;
  LevelLabel level_b;
  double min_gap = 0.0;  // J
};

struct CrossingScan {
  double gbar_min = 0.0;  // scanned range after clipping to the stable region
  double gbar_max = 0.0;
  std::vector<CrossingPoint> crossings;
  std::vector<LevelPair> degenerate_pairs;  // equal over the whole scan
  std::vector<TangencyHint> possible_tangencies;
};

/// Open interval of Gbar in which every listed level is bound.
std::pair<double, double> stable_gbar_interval(const SpinSystem& sys, std::span<const LevelLabel> levels);

/// Scans E_a(Gbar) - E_b(Gbar) for every pair of `levels` on steps+1 evenly
/// spaced points of `gbar_range` (clipped to the stable interval), and
/// bisects each sign change to relative width 1e-10 and a gap below
/// 1e-10 max(|E_a|, |E_b|).
CrossingScan crossing_scan(const SpinSystem& sys, const FieldProfile& field_base,
                           std::pair<double, double> gbar_range, std::span<const LevelLabel> levels, int steps);

struct RegimeWeights {
  double quantum_weight = 0.0;          // sqrt(1 - Mbar)
  double classical_weight = 0.0;        // Mbar² / (4 (1 - Mbar))
  double classical_energy_scale = 0.0;  // m Omega² (G/Gbar)² / 2, J
  double ratio = 0.0;                   // classical / quantum energy for level n
};

/// Requires B0 = 0, a = 0, Gbar != 0 and a bound sector.
RegimeWeights regime_weights(const SpinSystem& sys, const FieldProfile& field, SpinProjection m, int n);

struct InversionResult {
  double omega_estimate = std::numeric_limits<double>::quiet_NaN();  // rad/s
  double residual_rms = std::numeric_limits<double>::quiet_NaN();    // Hz
  std::pair<double, double> bracket{0.0, 0.0};                       // searched range, rad/s
  bool identifiable = false;
  std::string reason;  // set when !identifiable
};

struct InversionOptions {
  int coarse_points = 512;
  double relative_tolerance = 1e-10;
  /// Accept the fit when the RMS residual is below this fraction of the RMS
  /// measured frequency.
  double fit_tolerance = 1e-6;
};

/// Least-squares estimate of Omega from labelled DeltaM = 1 lines at level n.
/// `sys_partial.omega` is ignored. Homogeneous fields and Omega-flat line
/// sets yield identifiable = false.
InversionResult identify_frequency(std::span<const TransitionLine> lines, const SpinSystem& sys_partial,
                                   const FieldProfile& field, int n, std::pair<double, double> bracket,
                                   const InversionOptions& options = {});

}  // namespace pmr
