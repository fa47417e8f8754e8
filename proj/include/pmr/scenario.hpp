#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmr/spectroscopy.hpp"
#include "pmr/types.hpp"

namespace pmr {

enum class OmegaUnit { rad_per_s, hz };

OmegaUnit parse_omega_unit(const std::string& text);

/// One run configuration. Physical quantities are stored in SI with omega
/// (and the inversion bracket) already converted to rad/s.
struct Scenario {
  SpinSystem system;
  FieldProfile field;
  OmegaUnit omega_unit = OmegaUnit::rad_per_s;

  int n = 0;      // level used by `lines` and `invert`
  int n_max = 4;  // highest n reported by `spectrum`, `crossings`, `validate`, `figure1`
  std::vector<LevelLabel> levels;  // crossing levels; empty = every M with n <= n_max
  std::optional<double> gbar_min;
  std::optional<double> gbar_max;
  int steps = 400;
  LineSelection selection;
  std::optional<std::pair<double, double>> bracket;
  std::optional<std::filesystem::path> measured_lines;
  double tolerance = 1e-8;

  /// Levels for crossing scans: `levels` or the default full set.
  std::vector<LevelLabel> scan_levels() const;
};

/// Defaults reproducing the parabolic-field EMR level diagram: S = 3/2,
/// electron gamma and mass, a = 1e-4 m, Omega = 1e5 rad/s, G = -0.003 T/m, B0 = 0.
Scenario figure1_defaults();

/// Strict parse of a flat JSON document. Unknown keys, wrong types and
/// invariant violations throw InvalidParameter naming the key. When
/// `require_physics` is false every key is optional and overrides `base`.
/// Relative `measured_lines` paths resolve against `base_dir`.
Scenario parse_config(const std::string& text, const Scenario& base, bool require_physics,
                      const std::filesystem::path& base_dir = {},
                      std::optional<OmegaUnit> unit_override = std::nullopt);

Scenario load_config(const std::filesystem::path& path, const Scenario& base = {}, bool require_physics = true,
                     std::optional<OmegaUnit> unit_override = std::nullopt);

}  // namespace pmr
