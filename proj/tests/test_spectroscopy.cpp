#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pmr/constants.hpp"
#include "pmr/errors.hpp"
#include "pmr/oracle.hpp"
#include "pmr/scenario.hpp"
#include "pmr/spectroscopy.hpp"
#include "pmr/spectrum.hpp"
#include "test_support.hpp"

using namespace pmr;
using constants::hbar;
using constants::two_pi;
using testing::relative_error;

namespace {

SpinProjection M(int twice) { return HalfInteger::from_twice(twice); }

SpinSystem spin(int twice_s) {
  SpinSystem s;
  s.mass = 4e-27;
  s.gamma = 1.5e8;
  s.spin = HalfInteger::from_twice(twice_s);
  s.omega = 6e4;
  return s;
}

}  // namespace

TEST_CASE("homogeneous field gives the Larmor line") {
  auto sys = spin(5);
  const FieldProfile field{0.35, 0.0, 0.0};
  const double larmor = std::abs(sys.gamma) * field.b0 / two_pi;
  for (const int n : {0, 3}) {
    for (const double omega : {1e3, 1e5}) {
      sys.omega = omega;
      LineSelection sel;
      sel.n = n;
      const auto lines = transition_lines(sys, field, sel);
      REQUIRE(lines.size() == 5);
      for (const auto& line : lines) {
        CHECK(relative_error(line.frequency_hz, larmor) < 1e-14);
        CHECK(line.frequency_rad == doctest::Approx(line.frequency_hz * two_pi).epsilon(1e-15));
        CHECK(line.delta_e >= 0.0);
      }
    }
  }
}

TEST_CASE("linear gradient spreads the lines linearly in 2M+1") {
  auto sys = spin(3);
  sys.offset = 3e-8;
  const FieldProfile field{0.01, 250.0, 0.0};
  LineSelection sel;
  sel.n = 1;
  const auto lines = transition_lines(sys, field, sel);
  REQUIRE(lines.size() == 3);
  // signed M -> M+1 frequencies, ordered by M
  std::vector<double> f;
  for (const auto m : {M(-3), M(-1), M(1)}) {
    f.push_back(transition_energy(sys, field, {m, 1}, {m.next(), 1}) / (two_pi * hbar));
  }
  const double slope = -sys.gamma * sys.gamma * field.g * field.g * hbar / (2.0 * sys.mass * sys.omega * sys.omega * two_pi);
  // consecutive lines differ by 2 in (2M+1)
  CHECK(relative_error(f[1] - f[0], 2.0 * slope) < 1e-6);
  CHECK(relative_error(f[2] - f[1], 2.0 * slope) < 1e-6);
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) CHECK(lines[i].frequency_hz <= lines[i + 1].frequency_hz);
}

TEST_CASE("M = 0 vibrational line sits at Omega / 2 pi") {
  auto sys = spin(2);
  const FieldProfile field{0.2, 30.0, 0.4 * stability_check(sys, {}).gbar_crit};
  LineSelection sel;
  sel.rule = SelectionRule::delta_n1_fixed_m;
  sel.n = 2;
  const auto lines = transition_lines(sys, field, sel);
  REQUIRE(lines.size() == 3);
  const auto zero = std::find_if(lines.begin(), lines.end(), [](const TransitionLine& l) { return l.from.m.is_zero(); });
  REQUIRE(zero != lines.end());
  CHECK(relative_error(zero->frequency_hz, sys.omega / two_pi) < 1e-14);
}

TEST_CASE("all pairs with a cutoff") {
  const auto sys = spin(2);
  const FieldProfile field{0.01, 20.0, 0.2 * stability_check(sys, {}).gbar_crit};
  LineSelection sel;
  sel.rule = SelectionRule::all_pairs_within;
  sel.n_max = 2;
  const auto all = transition_lines(sys, field, sel);
  CHECK(all.size() == 36);  // 9 levels, 9*8/2 pairs
  sel.cutoff_hz = all[all.size() / 2].frequency_hz;
  const auto cut = transition_lines(sys, field, sel);
  CHECK(cut.size() < all.size());
  for (const auto& l : cut) CHECK(l.frequency_hz <= sel.cutoff_hz);
  CHECK(std::is_sorted(cut.begin(), cut.end(),
                       [](const TransitionLine& a, const TransitionLine& b) { return a.frequency_hz < b.frequency_hz; }));
}

TEST_CASE("lines refuse a dissociated sector") {
  const auto sys = spin(3);
  const FieldProfile field{0.0, 0.0, 1.2 * stability_check(sys, {}).gbar_crit};
  LineSelection sel;
  CHECK_THROWS_AS(transition_lines(sys, field, sel), DissociationError);
  CHECK_THROWS_WITH(transition_lines(sys, field, sel), doctest::Contains("M=1.5"));
}

TEST_CASE("regime weights") {
  auto sys = spin(2);
  const double crit = stability_check(sys, {}).gbar_crit;
  SUBCASE("M = 0") {
    const auto w = regime_weights(sys, {0.0, 5.0, 0.3 * crit}, M(0), 1);
    CHECK(w.quantum_weight == 1.0);
    CHECK(w.classical_weight == 0.0);
    CHECK(w.ratio == 0.0);
  }
  SUBCASE("Mbar = 0.1") {
    const FieldProfile field{0.0, 5.0, 0.1 * crit};
    REQUIRE(scaled_spin_number(sys, field, M(2)) == doctest::Approx(0.1).epsilon(1e-14));
    const auto w = regime_weights(sys, field, M(2), 0);
    CHECK(w.quantum_weight == doctest::Approx(std::sqrt(0.9)).epsilon(1e-14));
    CHECK(w.classical_weight == doctest::Approx(0.01 / 3.6).epsilon(1e-13));
    const double e_cl = sys.mass * sys.omega * sys.omega * std::pow(field.g / field.gbar, 2) / 2;
    CHECK(w.classical_energy_scale == doctest::Approx(e_cl).epsilon(1e-14));
    CHECK(w.ratio == doctest::Approx(w.classical_weight * e_cl / (w.quantum_weight * hbar * sys.omega * 0.5)).epsilon(1e-14));
  }
  SUBCASE("doubling G multiplies the ratio by four") {
    const auto w1 = regime_weights(sys, {0.0, 3.0, 0.2 * crit}, M(-2), 2);
    const auto w2 = regime_weights(sys, {0.0, 6.0, 0.2 * crit}, M(-2), 2);
    CHECK(w2.ratio == doctest::Approx(4.0 * w1.ratio).epsilon(1e-14));
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(regime_weights(sys, {0.1, 3.0, 0.2 * crit}, M(2), 0), DomainError);
    CHECK_THROWS_AS(regime_weights(sys, {0.0, 3.0, 0.0}, M(2), 0), DomainError);
    sys.offset = 1e-9;
    CHECK_THROWS_AS(regime_weights(sys, {0.0, 3.0, 0.2 * crit}, M(2), 0), DomainError);
    sys.offset = 0.0;
    CHECK_THROWS_AS(regime_weights(sys, {0.0, 3.0, 1.5 * crit}, M(2), 0), DissociationError);
    CHECK_THROWS_AS(regime_weights(sys, {0.0, 3.0, 0.2 * crit}, M(2), -1), InvalidParameter);
  }
  SUBCASE("weights stay in range for Mbar in [0, 1)") {
    for (const double x : {0.0, 0.25, 0.5, 0.9, 0.999}) {
      const auto w = regime_weights(sys, {0.0, 3.0, (x == 0.0 ? 0.5 : x) * crit}, x == 0.0 ? M(0) : M(2), 0);
      CHECK(w.quantum_weight > 0.0);
      CHECK(w.quantum_weight <= 1.0);
      CHECK(w.classical_weight >= 0.0);
    }
  }
}

TEST_CASE("crossing scan") {
  SUBCASE("no field at all: every M degenerate") {
    const auto sys = spin(3);
    const std::vector<LevelLabel> levels{{M(-3), 0}, {M(-1), 0}, {M(1), 0}, {M(3), 0}};
    const auto scan = crossing_scan(sys, {}, {0.0, 0.0}, levels, 16);
    CHECK(scan.crossings.empty());
    CHECK(scan.degenerate_pairs.size() == 6);
  }
  SUBCASE("parabolic-field EMR configuration") {
    const auto s = figure1_defaults();
    const auto levels = s.scan_levels();
    REQUIRE(levels.size() == 4 * (s.n_max + 1));
    const double crit = stability_check(s.system, s.field).gbar_crit;
    const auto scan = crossing_scan(s.system, s.field, {0.0, 0.999 * crit}, levels, 400);
    REQUIRE_FALSE(scan.crossings.empty());
    for (const auto& c : scan.crossings) {
      FieldProfile f = s.field;
      f.gbar = c.gbar;
      const double ea = energy_level(s.system, f, c.level_a.m, c.level_a.n);
      const double eb = energy_level(s.system, f, c.level_b.m, c.level_b.n);
      CHECK(std::abs(ea - eb) < 1e-10 * std::max(std::abs(ea), std::abs(eb)));
      CHECK(c.level_a != c.level_b);
      CHECK(c.bracket_width <= 1e-10 * std::abs(c.gbar) + 1e-300);
      // the gap changes sign across the crossing
      FieldProfile below = f, above = f;
      const double step = 1e-6 * crit;
      below.gbar -= step;
      above.gbar += step;
      const double d_below = transition_energy(s.system, below, c.level_b, c.level_a);
      const double d_above = transition_energy(s.system, above, c.level_b, c.level_a);
      CHECK(d_below * d_above < 0.0);
    }
    CHECK(std::is_sorted(scan.crossings.begin(), scan.crossings.end(),
                         [](const CrossingPoint& a, const CrossingPoint& b) { return a.gbar < b.gbar; }));

    // dense brute-force count of sign changes over the same range
    std::size_t expected = 0;
    const int dense = 40000;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (std::size_t j = i + 1; j < levels.size(); ++j) {
        double prev = 0.0;
        for (int k = 0; k <= dense; ++k) {
          FieldProfile f = s.field;
          f.gbar = scan.gbar_min + (scan.gbar_max - scan.gbar_min) * k / dense;
          const double d = energy_level(s.system, f, levels[i].m, levels[i].n) -
                           energy_level(s.system, f, levels[j].m, levels[j].n);
          if (k > 0 && d * prev < 0.0) ++expected;
          prev = d;
        }
      }
    }
    CHECK(scan.crossings.size() == expected);
  }
  SUBCASE("range clipped to the stable region") {
    const auto s = figure1_defaults();
    const double crit = stability_check(s.system, s.field).gbar_crit;
    const auto levels = s.scan_levels();
    const auto scan = crossing_scan(s.system, s.field, {0.0, 2.0 * crit}, levels, 64);
    CHECK(scan.gbar_max < crit);
    CHECK(scan.gbar_max > 0.999 * crit);
    CHECK_THROWS_AS(crossing_scan(s.system, s.field, {1.1 * crit, 2.0 * crit}, levels, 64), DomainError);
  }
  SUBCASE("rejections") {
    const auto s = figure1_defaults();
    const std::vector<LevelLabel> none;
    const std::vector<LevelLabel> dup{{M(1), 0}, {M(1), 0}};
    const std::vector<LevelLabel> bad{{M(2), 0}, {M(1), 0}};
    const std::vector<LevelLabel> ok{{M(1), 0}, {M(3), 0}};
    CHECK_THROWS_AS(crossing_scan(s.system, s.field, {0.0, 1.0}, none, 64), InvalidParameter);
    CHECK_THROWS_WITH(crossing_scan(s.system, s.field, {0.0, 1.0}, dup, 64), doctest::Contains("duplicate"));
    CHECK_THROWS_AS(crossing_scan(s.system, s.field, {0.0, 1.0}, bad, 64), InvalidParameter);
    CHECK_THROWS_AS(crossing_scan(s.system, s.field, {0.0, 1.0}, ok, 8), InvalidParameter);
    CHECK_THROWS_AS(crossing_scan(s.system, s.field, {1.0, 0.0}, ok, 64), InvalidParameter);
  }
}

TEST_CASE("frequency identification") {
  SUBCASE("round trip at 1e5 rad/s") {
    const auto s = figure1_defaults();
    FieldProfile field = s.field;
    field.gbar = 0.3 * stability_check(s.system, field).gbar_crit;
    LineSelection sel;
    sel.n = 1;
    const auto lines = transition_lines(s.system, field, sel);
    auto partial = s.system;
    partial.omega = 0.0;
    const auto result = identify_frequency(lines, partial, field, 1, {1e4, 1e6});
    CHECK(result.identifiable);
    CHECK(relative_error(result.omega_estimate, s.system.omega) < 1e-6);
    CHECK(result.omega_estimate > result.bracket.first);
    CHECK(result.omega_estimate < result.bracket.second);
  }
  SUBCASE("homogeneous field") {
    auto sys = spin(3);
    const FieldProfile field{0.3, 0.0, 0.0};
    const auto lines = transition_lines(sys, field, {});
    const auto result = identify_frequency(lines, sys, field, 0, {1e3, 1e6});
    CHECK_FALSE(result.identifiable);
    CHECK(result.reason.find("homogeneous") != std::string::npos);
    CHECK(std::isnan(result.omega_estimate));
  }
  SUBCASE("two species fitted separately") {
    auto a = spin(2);
    a.omega = 3e4;
    auto b = spin(3);
    b.mass = 7e-27;
    b.gamma = -4e8;
    b.omega = 2.2e5;
    const FieldProfile field{0.05, 40.0, 0.0};
    for (const auto& sys : {a, b}) {
      const auto lines = transition_lines(sys, field, {});
      auto partial = sys;
      partial.omega = 1.0;
      const auto r = identify_frequency(lines, partial, field, 0, {1e3, 1e6});
      CHECK(r.identifiable);
      CHECK(relative_error(r.omega_estimate, sys.omega) < 1e-6);
    }
  }
  SUBCASE("lines must be DeltaM = 1 at the stated level") {
    auto sys = spin(3);
    const FieldProfile field{0.05, 40.0, 0.0};
    auto lines = transition_lines(sys, field, {});
    CHECK_THROWS_AS(identify_frequency(lines, sys, field, 1, {1e3, 1e6}), InvalidParameter);
    lines[0].to = {M(3), 0};
    lines[0].from = {M(-3), 0};
    CHECK_THROWS_AS(identify_frequency(lines, sys, field, 0, {1e3, 1e6}), InvalidParameter);
    CHECK_THROWS_AS(identify_frequency({}, sys, field, 0, {1e3, 1e6}), InvalidParameter);
    CHECK_THROWS_AS(identify_frequency(lines, sys, field, 0, {1e6, 1e3}), InvalidParameter);
  }
  SUBCASE("optimum outside the bracket") {
    auto sys = spin(3);
    const FieldProfile field{0.05, 40.0, 0.0};
    const auto lines = transition_lines(sys, field, {});
    CHECK_THROWS_WITH(identify_frequency(lines, sys, field, 0, {1e2, 1e4}),
                      doctest::Contains("bracket does not contain optimum"));
  }
  SUBCASE("randomized round trips") {
    std::mt19937_64 rng(55);
    int done = 0;
    while (done < 25) {
      const auto s = testing::random_stable_scenario(rng);
      if (s.system.spin.twice() < 2) continue;
      const int n = std::uniform_int_distribution<int>(0, 3)(rng);
      LineSelection sel;
      sel.n = n;
      const auto lines = transition_lines(s.system, s.field, sel);
      const auto r = identify_frequency(lines, s.system, s.field, n, {s.system.omega / 10, s.system.omega * 10});
      CHECK(r.identifiable);
      CHECK(relative_error(r.omega_estimate, s.system.omega) < 1e-6);
      ++done;
    }
  }
}

TEST_CASE("line vector depends on Omega once a gradient is present") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    auto s = testing::random_stable_scenario(rng);
    if (s.system.spin.twice() < 2) continue;
    const auto base = transition_lines(s.system, s.field, {});
    auto shifted = s.system;
    shifted.omega *= 1.001;
    const auto moved = transition_lines(shifted, s.field, {});
    double change = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) change += std::abs(moved[i].frequency_hz - base[i].frequency_hz);
    CHECK(change > 0.0);
  }
}

TEST_CASE("gradient lines cross-checked against the oracle") {
  auto sys = spin(2);
  sys.offset = 1e-8;
  const FieldProfile field{0.0, 300.0, 0.0};
  for (const auto m : {M(-2), M(0)}) {
    const auto lo = converged_spectrum(sys, field, m, 2, 1e-10);
    const auto hi = converged_spectrum(sys, field, m.next(), 2, 1e-10);
    const double numeric = hi.energies_j[1] - lo.energies_j[1];
    const double analytic = transition_energy(sys, field, {m, 1}, {m.next(), 1});
    CHECK(std::abs(numeric - analytic) < 1e-9 * hbar * sys.omega);
  }
}
