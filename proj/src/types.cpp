#include "pmr/types.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "pmr/errors.hpp"

namespace pmr {

HalfInteger HalfInteger::from_value(double value, const std::string& parameter) {
  const double twice = 2.0 * value;
  if (!std::isfinite(twice) || twice != std::round(twice) ||
      std::abs(twice) > std::numeric_limits<int>::max() / 4) {
    throw InvalidParameter(parameter, "not a half-integer: " + std::to_string(value));
  }
  return from_twice(static_cast<int>(std::lround(twice)));
}

std::string HalfInteger::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", value());
  return buf;
}

void SpinSystem::validate() const {
  if (!(std::isfinite(mass) && mass > 0.0)) throw InvalidParameter("mass", "must be finite and > 0");
  if (!(std::isfinite(omega) && omega > 0.0)) throw InvalidParameter("omega", "must be finite and > 0");
  if (!std::isfinite(gamma)) throw InvalidParameter("gamma", "must be finite");
  if (!std::isfinite(offset)) throw InvalidParameter("offset", "must be finite");
  if (spin.twice() < 0) throw InvalidParameter("spin", "must be >= 0");
  if (sample_half_length) {
    if (!(std::isfinite(*sample_half_length) && *sample_half_length > 0.0)) {
      throw InvalidParameter("sample_half_length", "must be finite and > 0");
    }
    if (!(std::abs(offset) < *sample_half_length)) {
      throw InvalidParameter("offset", "|offset| must be < sample_half_length");
    }
  }
}

bool SpinSystem::admits(SpinProjection m) const noexcept {
  const int s2 = spin.twice();
  const int m2 = m.twice();
  return m2 >= -s2 && m2 <= s2 && (s2 - m2) % 2 == 0;
}

std::vector<SpinProjection> SpinSystem::projections() const {
  std::vector<SpinProjection> out;
  for (int m2 = -spin.twice(); m2 <= spin.twice(); m2 += 2) out.push_back(HalfInteger::from_twice(m2));
  return out;
}

void FieldProfile::validate() const {
  if (!std::isfinite(b0)) throw InvalidParameter("b0", "must be finite");
  if (!std::isfinite(g)) throw InvalidParameter("g", "must be finite");
  if (!std::isfinite(gbar)) throw InvalidParameter("gbar", "must be finite");
}

}  // namespace pmr
