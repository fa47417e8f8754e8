#pragma once

// Closed-form spectrum of a spin-S harmonic oscillator in the field
// B(x) = B0 + G x + Gbar x^2 along z. Each spin projection M decouples into a
// shifted oscillator of frequency Omega_M = Omega sqrt(1 - Mbar).
//
// All functions validate their inputs and are pure.

#include "pmr/types.hpp"

namespace pmr {

/// Mbar = 2 gamma Gbar hbar M / (Omega² m). Zero whenever M, gamma or Gbar is zero.
double scaled_spin_number(const SpinSystem& sys, const FieldProfile& field, SpinProjection m);

/// Omega sqrt(1 - Mbar); throws DissociationError when Mbar >= 1.
double effective_frequency(const SpinSystem& sys, const FieldProfile& field, SpinProjection m);

/// Critical |Gbar| = m Omega² / (2 |gamma| hbar S) and whether every
/// projection has Mbar < 1. The projection with the largest Mbar is reported
/// as the worst one (ties resolve to the highest M).
StabilityReport stability_check(const SpinSystem& sys, const FieldProfile& field);

DerivedParams derived_params(const SpinSystem& sys, const FieldProfile& field, SpinProjection m);

EnergyTerms energy_terms(const SpinSystem& sys, const FieldProfile& field, SpinProjection m, int n);

/// E_{M,n} in J.
double energy_level(const SpinSystem& sys, const FieldProfile& field, SpinProjection m, int n);

/// Signed E(to) - E(from) in J, differenced term by term. In a homogeneous
/// field the result carries no dependence on Omega at all, bit for bit.
double transition_energy(const SpinSystem& sys, const FieldProfile& field, LevelLabel from, LevelLabel to);

/// Quantum/classical decomposition; requires B0 = 0 and Gbar != 0
/// (DomainError "decomposition undefined" otherwise).
EnergyDecomposition energy_decomposition(const SpinSystem& sys, const FieldProfile& field, SpinProjection m,
                                         int n);

/// Center of the sector-M eigenfunctions: a + gamma (G + 2 Gbar a) hbar M / (m Omega_M²).
double eigenfunction_center(const SpinSystem& sys, const FieldProfile& field, SpinProjection m);

/// phi_{M,n}(x) = Psi_n(Omega_M; x - center), m^-1/2.
double eigenfunction(const SpinSystem& sys, const FieldProfile& field, SpinProjection m, int n, double x);

}  // namespace pmr
