#include "pmr/spectrum.hpp"

#include <cmath>
#include <limits>

#include "pmr/constants.hpp"
#include "pmr/errors.hpp"
#include "pmr/oscillator.hpp"

namespace pmr {

namespace {

using constants::hbar;

void check_inputs(const SpinSystem& sys, const FieldProfile& field, SpinProjection m) {
  sys.validate();
  field.validate();
  if (!sys.admits(m)) {
    throw InvalidParameter("M", "projection " + m.to_string() + " not allowed for spin " + sys.spin.to_string());
  }
}

void check_n(int n) {
  if (n < 0) throw InvalidParameter("n", "oscillator quantum number must be >= 0");
}

double mbar_unchecked(const SpinSystem& sys, const FieldProfile& field, SpinProjection m) {
  if (m.is_zero() || sys.gamma == 0.0 || field.gbar == 0.0) return 0.0;
  // Same operation order as the critical-Gbar formula so that Gbar = Gbar_crit
  // lands on Mbar = 1 exactly for M = ±S.
  const double gbar_at_unity = sys.mass * sys.omega * sys.omega / (2.0 * sys.gamma * hbar * m.value());
  return field.gbar / gbar_at_unity;
}

double omega_eff_unchecked(const SpinSystem& sys, double mbar) { return sys.omega * std::sqrt(1.0 - mbar); }

double require_stable(const SpinSystem& sys, const FieldProfile& field, SpinProjection m) {
  const double mbar = mbar_unchecked(sys, field, m);
  if (!(mbar < 1.0)) throw DissociationError(m, mbar, "effective frequency imaginary");
  return mbar;
}

double critical_gbar(const SpinSystem& sys) {
  if (sys.spin.is_zero() || sys.gamma == 0.0) return std::numeric_limits<double>::infinity();
  return sys.mass * sys.omega * sys.omega / (2.0 * std::abs(sys.gamma) * hbar * sys.spin.value());
}

double field_at_offset(const SpinSystem& sys, const FieldProfile& field) {
  const double a = sys.offset;
  return field.b0 + field.g * a + field.gbar * a * a;
}

double gradient_at_offset(const SpinSystem& sys, const FieldProfile& field) {
  return field.g + 2.0 * field.gbar * sys.offset;
}

// Mbar in extended precision, for energy values only; the stability decision
// always uses the double from mbar_unchecked.
long double mbar_extended(const SpinSystem& sys, const FieldProfile& field, SpinProjection m) {
  if (m.is_zero() || sys.gamma == 0.0 || field.gbar == 0.0) return 0.0L;
  using ext = long double;
  return ext{field.gbar} / (ext{sys.mass} * sys.omega * sys.omega / (2.0L * sys.gamma * hbar * m.value()));
}

struct SectorTerms {
  double omega_eff;
  double shift;
};

SectorTerms sector_terms(const SpinSystem& sys, const FieldProfile& field, SpinProjection m) {
  const double mbar = require_stable(sys, field, m);
  const double omega_eff = omega_eff_unchecked(sys, mbar);
  const double coupling = sys.gamma * gradient_at_offset(sys, field) * hbar * m.value();
  const double shift = -(coupling * coupling) / (2.0 * sys.mass * omega_eff * omega_eff);
  return {omega_eff, shift};
}

}  // namespace

double scaled_spin_number(const SpinSystem& sys, const FieldProfile& field, SpinProjection m) {
  check_inputs(sys, field, m);
  return mbar_unchecked(sys, field, m);
}

double effective_frequency(const SpinSystem& sys, const FieldProfile& field, SpinProjection m) {
  check_inputs(sys, field, m);
  return omega_eff_unchecked(sys, require_stable(sys, field, m));
}

StabilityReport stability_check(const SpinSystem& sys, const FieldProfile& field) {
  sys.validate();
  field.validate();
  StabilityReport report;
  report.gbar_crit = critical_gbar(sys);
  report.worst_m = sys.spin;
  report.worst_mbar = -std::numeric_limits<double>::infinity();
  for (const auto m : sys.projections()) {
    const double mbar = mbar_unchecked(sys, field, m);
    if (mbar >= report.worst_mbar) {
      report.worst_mbar = mbar;
      report.worst_m = m;
    }
  }
  report.stable = report.worst_mbar < 1.0;
  return report;
}

DerivedParams derived_params(const SpinSystem& sys, const FieldProfile& field, SpinProjection m) {
  check_inputs(sys, field, m);
  DerivedParams p;
  p.mbar = mbar_unchecked(sys, field, m);
  p.gbar_crit = critical_gbar(sys);
  p.stable = p.mbar < 1.0;
  if (p.stable) {
    p.omega_eff = omega_eff_unchecked(sys, p.mbar);
    p.center = eigenfunction_center(sys, field, m);
  } else {
    p.omega_eff = std::numeric_limits<double>::quiet_NaN();
    p.center = std::numeric_limits<double>::quiet_NaN();
  }
  return p;
}

EnergyTerms energy_terms(const SpinSystem& sys, const FieldProfile& field, SpinProjection m, int n) {
  check_inputs(sys, field, m);
  check_n(n);
  const auto sector = sector_terms(sys, field, m);
  EnergyTerms t;
  t.oscillator = hbar * sector.omega_eff * (n + 0.5);
  t.zeeman = -sys.gamma * field_at_offset(sys, field) * hbar * m.value();
  t.shift = sector.shift;
  return t;
}

double energy_level(const SpinSystem& sys, const FieldProfile& field, SpinProjection m, int n) {
  check_inputs(sys, field, m);
  check_n(n);
  // The three terms can be far larger than their sum, so they are formed and
  // added in extended precision and rounded once.
  using ext = long double;
  require_stable(sys, field, m);
  const ext mbar = mbar_extended(sys, field, m);
  const ext omega_sq_eff = ext{sys.omega} * sys.omega * (1.0L - mbar);
  const ext oscillator = ext{hbar} * std::sqrt(omega_sq_eff) * (n + 0.5L);
  const ext a = sys.offset;
  const ext b_at_a = ext{field.b0} + ext{field.g} * a + ext{field.gbar} * a * a;
  const ext zeeman = -ext{sys.gamma} * b_at_a * hbar * m.value();
  const ext coupling = ext{sys.gamma} * (ext{field.g} + 2.0L * field.gbar * a) * hbar * m.value();
  const ext shift = -(coupling * coupling) / (2.0L * sys.mass * omega_sq_eff);
  return static_cast<double>(oscillator + zeeman + shift);
}

double transition_energy(const SpinSystem& sys, const FieldProfile& field, LevelLabel from, LevelLabel to) {
  check_inputs(sys, field, from.m);
  check_inputs(sys, field, to.m);
  check_n(from.n);
  check_n(to.n);
  const auto a = sector_terms(sys, field, from.m);
  const auto b = sector_terms(sys, field, to.m);
  const double oscillator = hbar * (b.omega_eff * (to.n + 0.5) - a.omega_eff * (from.n + 0.5));
  const double zeeman = -sys.gamma * field_at_offset(sys, field) * hbar * (to.m.value() - from.m.value());
  return oscillator + zeeman + (b.shift - a.shift);
}

EnergyDecomposition energy_decomposition(const SpinSystem& sys, const FieldProfile& field, SpinProjection m,
                                         int n) {
  check_inputs(sys, field, m);
  check_n(n);
  if (field.b0 != 0.0) throw DomainError("decomposition undefined: requires b0 = 0");
  if (field.gbar == 0.0) throw DomainError("decomposition undefined: requires gbar != 0");
  require_stable(sys, field, m);

  // extended precision for the same reason as energy_level
  using ext = long double;
  const ext mb = mbar_extended(sys, field, m);
  const ext a = sys.offset;
  const ext ratio = ext{field.g} / field.gbar;
  const ext scale = ext{sys.mass} * sys.omega * sys.omega / 2.0L;
  const ext weight = mb / (1.0L - mb);

  const ext quantum = ext{hbar} * sys.omega * (n + 0.5L) * std::sqrt(1.0L - mb);
  const ext g_term = -(scale * ratio * a) * weight;
  const ext a_term = -(scale * a * a) * weight;
  const ext mixed = -(scale * ratio * ratio) * (mb * mb / (4.0L * (1.0L - mb)));
  EnergyDecomposition d;
  d.quantum_term = static_cast<double>(quantum);
  d.classical_g_term = static_cast<double>(g_term);
  d.classical_a_term = static_cast<double>(a_term);
  d.classical_mixed_term = static_cast<double>(mixed);
  d.total = static_cast<double>(quantum + g_term + a_term + mixed);
  return d;
}

double eigenfunction_center(const SpinSystem& sys, const FieldProfile& field, SpinProjection m) {
  check_inputs(sys, field, m);
  const double omega_eff = omega_eff_unchecked(sys, require_stable(sys, field, m));
  return sys.offset +
         sys.gamma * gradient_at_offset(sys, field) * hbar * m.value() / (sys.mass * omega_eff * omega_eff);
}

double eigenfunction(const SpinSystem& sys, const FieldProfile& field, SpinProjection m, int n, double x) {
  check_n(n);
  const double center = eigenfunction_center(sys, field, m);
  return oscillator_wavefunction(n, effective_frequency(sys, field, m), sys.mass, x - center);
}

}  // namespace pmr
