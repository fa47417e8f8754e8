#include "pmr/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "pmr/constants.hpp"
#include "pmr/errors.hpp"
#include "pmr/spectrum.hpp"

namespace pmr {

namespace {

using constants::hbar;
using constants::two_pi;

constexpr double kCrossingRelativeWidth = 1e-10;
constexpr double kCrossingRelativeGap = 1e-10;
constexpr double kStableMargin = 1e-6;
constexpr double kFlatness = 1e-12;

bool line_less(const TransitionLine& x, const TransitionLine& y) {
  if (x.frequency_hz != y.frequency_hz) return x.frequency_hz < y.frequency_hz;
  if (x.from != y.from) return x.from < y.from;
  return x.to < y.to;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Minimizes f on [lo, hi]; returns the abscissa.
template <typename F>
double golden_section(F&& f, double lo, double hi, double rel_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 400 && (hi - lo) > rel_tol * std::max(std::abs(lo), std::abs(hi)); ++it) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace

TransitionLine make_line(const SpinSystem& sys, const FieldProfile& field, LevelLabel from, LevelLabel to) {
  TransitionLine line;
  line.from = from;
  line.to = to;
  line.delta_e = std::abs(transition_energy(sys, field, from, to));
  line.frequency_rad = line.delta_e / hbar;
  line.frequency_hz = line.delta_e / (two_pi * hbar);
  return line;
}

std::vector<TransitionLine> transition_lines(const SpinSystem& sys, const FieldProfile& field,
                                             const LineSelection& selection) {
  sys.validate();
  field.validate();
  std::vector<TransitionLine> lines;
  const auto projections = sys.projections();
  switch (selection.rule) {
    case SelectionRule::delta_m1_fixed_n:
      if (selection.n < 0) throw InvalidParameter("n", "must be >= 0");
      for (std::size_t i = 0; i + 1 < projections.size(); ++i) {
        lines.push_back(make_line(sys, field, {projections[i], selection.n}, {projections[i + 1], selection.n}));
      }
      break;
    case SelectionRule::delta_n1_fixed_m:
      if (selection.n < 0) throw InvalidParameter("n", "must be >= 0");
      for (const auto m : projections) {
        lines.push_back(make_line(sys, field, {m, selection.n}, {m, selection.n + 1}));
      }
      break;
    case SelectionRule::all_pairs_within: {
      if (selection.n_max < 0) throw InvalidParameter("n_max", "must be >= 0");
      std::vector<LevelLabel> levels;
      for (const auto m : projections) {
        for (int n = 0; n <= selection.n_max; ++n) levels.push_back({m, n});
      }
      for (std::size_t i = 0; i < levels.size(); ++i) {
        for (std::size_t j = i + 1; j < levels.size(); ++j) {
          auto line = make_line(sys, field, levels[i], levels[j]);
          if (line.frequency_hz <= selection.cutoff_hz) lines.push_back(line);
        }
      }
      break;
    }
  }
  std::sort(lines.begin(), lines.end(), line_less);
  return lines;
}

std::pair<double, double> stable_gbar_interval(const SpinSystem& sys, std::span<const LevelLabel> levels) {
  sys.validate();
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  for (const auto& level : levels) {
    if (level.m.is_zero() || sys.gamma == 0.0) continue;
    // Gbar at which Mbar = 1 for this projection; its sign is that of gamma*M.
    const double unity = sys.mass * sys.omega * sys.omega / (2.0 * sys.gamma * hbar * level.m.value());
    if (unity > 0.0) {
      upper = std::min(upper, unity);
    } else {
      lower = std::max(lower, unity);
    }
  }
  return {lower, upper};
}

CrossingScan crossing_scan(const SpinSystem& sys, const FieldProfile& field_base,
                           std::pair<double, double> gbar_range, std::span<const LevelLabel> levels, int steps) {
  sys.validate();
  field_base.validate();
  if (levels.empty()) throw InvalidParameter("levels", "empty level list");
  std::set<LevelLabel> seen;
  for (const auto& level : levels) {
    if (!sys.admits(level.m)) throw InvalidParameter("levels", "projection " + level.m.to_string() + " not allowed");
    if (level.n < 0) throw InvalidParameter("levels", "n must be >= 0");
    if (!seen.insert(level).second) {
      throw InvalidParameter("levels", "duplicate level (M=" + level.m.to_string() + ", n=" +
                                           std::to_string(level.n) + ")");
    }
  }
  if (steps < 16) throw InvalidParameter("steps", "must be >= 16");
  auto [lo, hi] = gbar_range;
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi)) {
    throw InvalidParameter("gbar_range", "need finite gbar_min <= gbar_max");
  }

  const auto [stable_lo, stable_hi] = stable_gbar_interval(sys, levels);
  if (hi <= stable_lo || lo >= stable_hi) throw DomainError("range entirely unstable for the requested levels");
  if (std::isfinite(stable_hi) && hi >= stable_hi) hi = stable_hi - kStableMargin * std::abs(stable_hi);
  if (std::isfinite(stable_lo) && lo <= stable_lo) lo = stable_lo + kStableMargin * std::abs(stable_lo);
  if (lo > hi) throw DomainError("range entirely unstable for the requested levels");

  CrossingScan scan;
  scan.gbar_min = lo;
  scan.gbar_max = hi;

  auto field_at = [&](double gbar) {
    FieldProfile f = field_base;
    f.gbar = gbar;
    return f;
  };
  // gap = E_a - E_b, differenced term by term
  auto gap = [&](const LevelLabel& a, const LevelLabel& b, double gbar) {
    return transition_energy(sys, field_at(gbar), b, a);
  };
  auto gap_tolerance = [&](const LevelLabel& a, const LevelLabel& b, double gbar) {
    const auto f = field_at(gbar);
    return kCrossingRelativeGap *
           std::max(std::abs(energy_level(sys, f, a.m, a.n)), std::abs(energy_level(sys, f, b.m, b.n)));
  };

  const int points = lo == hi ? 1 : steps + 1;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = points == 1 ? lo : lo + (hi - lo) * i / steps;

  for (std::size_t ia = 0; ia < levels.size(); ++ia) {
    for (std::size_t ib = ia + 1; ib < levels.size(); ++ib) {
      const auto& a = levels[ia];
      const auto& b = levels[ib];
      std::vector<double> d(points), tol(points);
      bool degenerate = true;
      for (int i = 0; i < points; ++i) {
        d[i] = gap(a, b, grid[i]);
        tol[i] = gap_tolerance(a, b, grid[i]);
        if (std::abs(d[i]) > tol[i]) degenerate = false;
      }
      if (degenerate) {
        scan.degenerate_pairs.push_back({a, b});
        continue;
      }

      for (int i = 0; i + 1 < points; ++i) {
        if (sign_of(d[i]) * sign_of(d[i + 1]) < 0) {
          double g_lo = grid[i];
          double g_hi = grid[i + 1];
          double d_lo = d[i];
          double d_hi = d[i + 1];
          for (int it = 0; it < 400; ++it) {
            const double width = g_hi - g_lo;
            const double best_gap = std::min(std::abs(d_lo), std::abs(d_hi));
            const double g_best = std::abs(d_lo) <= std::abs(d_hi) ? g_lo : g_hi;
            if (width <= kCrossingRelativeWidth * std::max(std::abs(g_lo), std::abs(g_hi)) &&
                best_gap <= gap_tolerance(a, b, g_best)) {
              break;
            }
            const double mid = 0.5 * (g_lo + g_hi);
            if (mid <= g_lo || mid >= g_hi) break;
            const double d_mid = gap(a, b, mid);
            if (d_mid == 0.0) {
              g_lo = g_hi = mid;
              d_lo = d_hi = 0.0;
              break;
            }
            if (sign_of(d_mid) == sign_of(d_lo)) {
              g_lo = mid;
              d_lo = d_mid;
            } else {
              g_hi = mid;
              d_hi = d_mid;
            }
          }
          CrossingPoint c;
          c.gbar = std::abs(d_lo) <= std::abs(d_hi) ? g_lo : g_hi;
          c.level_a = a;
          c.level_b = b;
          const auto f = field_at(c.gbar);
          c.energy = 0.5 * (energy_level(sys, f, a.m, a.n) + energy_level(sys, f, b.m, b.n));
          c.bracket_width = g_hi - g_lo;
          scan.crossings.push_back(c);
        }
      }

      for (int i = 1; i + 1 < points; ++i) {
        if (d[i] == 0.0) {
          CrossingPoint c{grid[i], a, b, 0.0, 0.0};
          const auto f = field_at(grid[i]);
          c.energy = 0.5 * (energy_level(sys, f, a.m, a.n) + energy_level(sys, f, b.m, b.n));
          if (sign_of(d[i - 1]) * sign_of(d[i + 1]) < 0) {
            scan.crossings.push_back(c);
          } else {
            scan.possible_tangencies.push_back({grid[i], a, b, 0.0});
          }
          continue;
        }
        const bool same_side = sign_of(d[i - 1]) == sign_of(d[i]) && sign_of(d[i + 1]) == sign_of(d[i]);
        const bool local_min = std::abs(d[i]) <= std::abs(d[i - 1]) && std::abs(d[i]) <= std::abs(d[i + 1]);
        if (!same_side || !local_min) continue;
        const auto abs_gap = [&](double g) { return std::abs(gap(a, b, g)); };
        const double g_min = golden_section(abs_gap, grid[i - 1], grid[i + 1], kCrossingRelativeWidth);
        const double min_gap = abs_gap(g_min);
        if (min_gap <= gap_tolerance(a, b, g_min)) scan.possible_tangencies.push_back({g_min, a, b, min_gap});
      }
    }
  }

  std::sort(scan.crossings.begin(), scan.crossings.end(), [](const CrossingPoint& x, const CrossingPoint& y) {
    if (x.gbar != y.gbar) return x.gbar < y.gbar;
    if (x.level_a != y.level_a) return x.level_a < y.level_a;
    return x.level_b < y.level_b;
  });
  return scan;
}

RegimeWeights regime_weights(const SpinSystem& sys, const FieldProfile& field, SpinProjection m, int n) {
  if (n < 0) throw InvalidParameter("n", "must be >= 0");
  if (field.b0 != 0.0 || sys.offset != 0.0 || field.gbar == 0.0) {
    throw DomainError("quantum/classical form undefined for these parameters (needs b0 = 0, offset = 0, gbar != 0)");
  }
  const double mbar = scaled_spin_number(sys, field, m);
  if (!(mbar < 1.0)) throw DissociationError(m, mbar, "quantum/classical form undefined");
  RegimeWeights w;
  w.quantum_weight = std::sqrt(1.0 - mbar);
  w.classical_weight = mbar * mbar / (4.0 * (1.0 - mbar));
  const double shape = field.g / field.gbar;
  w.classical_energy_scale = sys.mass * sys.omega * sys.omega * shape * shape / 2.0;
  w.ratio = w.classical_weight * w.classical_energy_scale / (w.quantum_weight * hbar * sys.omega * (n + 0.5));
  return w;
}

InversionResult identify_frequency(std::span<const TransitionLine> lines, const SpinSystem& sys_partial,
                                   const FieldProfile& field, int n, std::pair<double, double> bracket,
                                   const InversionOptions& options) {
  if (lines.empty()) throw InvalidParameter("lines", "at least one measured line is required");
  auto [lo, hi] = bracket;
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && lo < hi)) {
    throw InvalidParameter("bracket", "need 0 < bracket_min < bracket_max");
  }
  if (n < 0) throw InvalidParameter("n", "must be >= 0");
  if (options.coarse_points < 3) throw InvalidParameter("coarse_points", "must be >= 3");
  SpinSystem sys = sys_partial;
  sys.omega = std::sqrt(lo * hi);
  sys.validate();
  field.validate();
  for (const auto& line : lines) {
    if (line.from.n != n || line.to.n != n || std::abs(line.to.m.twice() - line.from.m.twice()) != 2) {
      throw InvalidParameter("lines", "expected DeltaM = 1 lines within level n = " + std::to_string(n));
    }
    if (!sys.admits(line.from.m) || !sys.admits(line.to.m)) {
      throw InvalidParameter("lines", "line label outside the spin multiplet");
    }
    if (!(std::isfinite(line.frequency_hz) && line.frequency_hz >= 0.0)) {
      throw InvalidParameter("lines", "measured frequency must be finite and >= 0");
    }
  }

  InversionResult result;
  result.bracket = {lo, hi};
  if (field.homogeneous()) {
    result.reason = "unidentifiable: homogeneous field";
    return result;
  }

  // Every sector touched by the lines must stay bound: Omega² > 2 gamma Gbar hbar M / m.
  double omega_sq_min = 0.0;
  for (const auto& line : lines) {
    for (const auto m : {line.from.m, line.to.m}) {
      omega_sq_min = std::max(omega_sq_min, 2.0 * sys.gamma * field.gbar * hbar * m.value() / sys.mass);
    }
  }
  const double omega_min = std::sqrt(omega_sq_min) * (1.0 + 1e-9);
  lo = std::max(lo, omega_min);
  if (!(lo < hi)) throw DomainError("bracket does not contain optimum: bracket lies in the dissociated regime");
  result.bracket = {lo, hi};

  double measured_ms = 0.0;
  for (const auto& line : lines) measured_ms += line.frequency_hz * line.frequency_hz;
  const double measured_rms = std::sqrt(measured_ms / lines.size());

  auto model = [&](double omega) {
    SpinSystem s = sys;
    s.omega = omega;
    std::vector<double> f;
    f.reserve(lines.size());
    for (const auto& line : lines) f.push_back(std::abs(transition_energy(s, field, line.from, line.to)) / (two_pi * hbar));
    return f;
  };
  auto residual = [&](double omega) {
    try {
      const auto f = model(omega);
      double ss = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) ss += (f[i] - lines[i].frequency_hz) * (f[i] - lines[i].frequency_hz);
      return std::sqrt(ss / f.size());
    } catch (const DissociationError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const int points = options.coarse_points;
  std::vector<double> omegas(points);
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  for (int j = 0; j < points; ++j) omegas[j] = std::exp(log_lo + (log_hi - log_lo) * j / (points - 1));
  omegas.front() = lo;
  omegas.back() = hi;

  const auto reference = model(omegas.front());
  double ref_scale = 0.0;
  for (const double f : reference) ref_scale = std::max(ref_scale, std::abs(f));
  double variation = 0.0;
  int best = 0;
  double best_res = std::numeric_limits<double>::infinity();
  for (int j = 0; j < points; ++j) {
    const auto f = model(omegas[j]);
    for (std::size_t i = 0; i < f.size(); ++i) variation = std::max(variation, std::abs(f[i] - reference[i]));
    const double r = residual(omegas[j]);
    if (r < best_res) {
      best_res = r;
      best = j;
    }
  }
  const double relative_variation = ref_scale > 0.0 ? variation / ref_scale : variation;
  if (relative_variation < kFlatness) {
    result.reason = "unidentifiable: line set independent of omega across the bracket";
    return result;
  }

  const double a = omegas[std::max(best - 1, 0)];
  const double b = omegas[std::min(best + 1, points - 1)];
  const double estimate = golden_section(residual, a, b, options.relative_tolerance);
  const bool at_edge = (best == 0 && estimate <= lo * (1.0 + 1e-9)) ||
                       (best == points - 1 && estimate >= hi * (1.0 - 1e-9));
  if (at_edge) throw DomainError("bracket does not contain optimum");

  result.omega_estimate = estimate;
  result.residual_rms = residual(estimate);
  result.identifiable = result.residual_rms <= options.fit_tolerance * measured_rms;
  if (!result.identifiable) {
    result.reason = "no frequency in the bracket reproduces the lines (rms residual " +
                    std::to_string(result.residual_rms) + " Hz)";
  }
  return result;
}

}  // namespace pmr
