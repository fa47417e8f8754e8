#include "pmr/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pmr/constants.hpp"
#include "pmr/errors.hpp"

namespace pmr {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys{
    "mass",    "gamma", "spin",     "omega",     "omega_unit",  "offset",      "sample_half_length",
    "b0",      "g",     "gbar",     "n",         "n_max",       "levels",      "gbar_min",
    "gbar_max", "steps", "rule",    "cutoff_hz", "bracket_min", "bracket_max", "measured_lines",
    "tolerance"};

const std::set<std::string> kPhysicsKeys{"mass", "gamma", "spin", "omega", "offset", "b0", "g", "gbar"};

double get_real(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw InvalidParameter(key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidParameter(key, "must be finite");
  return x;
}

int get_int(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number_integer()) throw InvalidParameter(key, "must be an integer");
  return v.get<int>();
}

std::string get_string(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_string()) throw InvalidParameter(key, "must be a string");
  return v.get<std::string>();
}

SelectionRule parse_rule(const std::string& text) {
  if (text == "deltaM1_fixed_n") return SelectionRule::delta_m1_fixed_n;
  if (text == "deltaN1_fixed_M") return SelectionRule::delta_n1_fixed_m;
  if (text == "all_pairs_within") return SelectionRule::all_pairs_within;
  throw InvalidParameter("rule", "expected deltaM1_fixed_n, deltaN1_fixed_M or all_pairs_within, got '" + text + "'");
}

double unit_factor(OmegaUnit unit) { return unit == OmegaUnit::hz ? constants::two_pi : 1.0; }

}  // namespace

OmegaUnit parse_omega_unit(const std::string& text) {
  if (text == "rad/s") return OmegaUnit::rad_per_s;
  if (text == "Hz") return OmegaUnit::hz;
  throw InvalidParameter("omega_unit", "expected 'rad/s' or 'Hz', got '" + text + "'");
}

std::vector<LevelLabel> Scenario::scan_levels() const {
  if (!levels.empty()) return levels;
  std::vector<LevelLabel> out;
  for (const auto m : system.projections()) {
    for (int k = 0; k <= n_max; ++k) out.push_back({m, k});
  }
  return out;
}

Scenario figure1_defaults() {
  Scenario s;
  s.system.mass = constants::electron_mass;
  s.system.gamma = constants::electron_gamma;
  s.system.spin = HalfInteger::from_twice(3);
  s.system.omega = 1e5;
  s.system.offset = 1e-4;
  s.field = {0.0, -0.003, 0.0};
  s.n_max = 2;
  s.steps = 400;
  return s;
}

Scenario parse_config(const std::string& text, const Scenario& base, bool require_physics,
                      const std::filesystem::path& base_dir, std::optional<OmegaUnit> unit_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidParameter("config", std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidParameter("config", "top level must be an object");
  for (const auto& item : doc.items()) {
    if (!kKnownKeys.contains(item.key())) throw InvalidParameter(item.key(), "unknown key");
  }
  if (require_physics) {
    for (const auto& key : kPhysicsKeys) {
      if (!doc.contains(key)) throw InvalidParameter(key, "missing required key");
    }
  }

  Scenario s = base;
  if (doc.contains("omega_unit")) s.omega_unit = parse_omega_unit(get_string(doc, "omega_unit"));
  if (unit_override) s.omega_unit = *unit_override;
  const double to_rad = unit_factor(s.omega_unit);

  if (doc.contains("mass")) s.system.mass = get_real(doc, "mass");
  if (doc.contains("gamma")) s.system.gamma = get_real(doc, "gamma");
  if (doc.contains("spin")) s.system.spin = HalfInteger::from_value(get_real(doc, "spin"), "spin");
  if (doc.contains("omega")) s.system.omega = get_real(doc, "omega") * to_rad;
  if (doc.contains("offset")) s.system.offset = get_real(doc, "offset");
  if (doc.contains("sample_half_length")) s.system.sample_half_length = get_real(doc, "sample_half_length");
  if (doc.contains("b0")) s.field.b0 = get_real(doc, "b0");
  if (doc.contains("g")) s.field.g = get_real(doc, "g");
  if (doc.contains("gbar")) s.field.gbar = get_real(doc, "gbar");

  if (doc.contains("n")) s.n = get_int(doc, "n");
  if (doc.contains("n_max")) s.n_max = get_int(doc, "n_max");
  if (doc.contains("steps")) s.steps = get_int(doc, "steps");
  if (doc.contains("gbar_min")) s.gbar_min = get_real(doc, "gbar_min");
  if (doc.contains("gbar_max")) s.gbar_max = get_real(doc, "gbar_max");
  if (doc.contains("rule")) s.selection.rule = parse_rule(get_string(doc, "rule"));
  if (doc.contains("cutoff_hz")) s.selection.cutoff_hz = get_real(doc, "cutoff_hz");
  if (doc.contains("tolerance")) s.tolerance = get_real(doc, "tolerance");
  if (doc.contains("bracket_min") != doc.contains("bracket_max")) {
    throw InvalidParameter(doc.contains("bracket_min") ? "bracket_max" : "bracket_min",
                           "bracket_min and bracket_max must be given together");
  }
  if (doc.contains("bracket_min")) {
    s.bracket = std::pair{get_real(doc, "bracket_min") * to_rad, get_real(doc, "bracket_max") * to_rad};
  }
  if (doc.contains("measured_lines")) {
    std::filesystem::path p = get_string(doc, "measured_lines");
    s.measured_lines = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  if (doc.contains("levels")) {
    const auto& arr = doc.at("levels");
    if (!arr.is_array()) throw InvalidParameter("levels", "must be an array of [M, n] pairs");
    s.levels.clear();
    for (const auto& item : arr) {
      if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number_integer()) {
        throw InvalidParameter("levels", "each entry must be [M, n]");
      }
      s.levels.push_back({HalfInteger::from_value(item[0].get<double>(), "levels"), item[1].get<int>()});
    }
  }

  s.system.validate();
  s.field.validate();
  if (s.n < 0) throw InvalidParameter("n", "must be >= 0");
  if (s.n_max < 0) throw InvalidParameter("n_max", "must be >= 0");
  if (s.steps < 16) throw InvalidParameter("steps", "must be >= 16");
  if (!(s.tolerance >= 1e-12)) throw InvalidParameter("tolerance", "must be >= 1e-12");
  if (s.bracket && !(s.bracket->first > 0.0 && s.bracket->first < s.bracket->second)) {
    throw InvalidParameter("bracket_min", "need 0 < bracket_min < bracket_max");
  }
  for (const auto& level : s.levels) {
    if (!s.system.admits(level.m)) throw InvalidParameter("levels", "M=" + level.m.to_string() + " not allowed");
    if (level.n < 0) throw InvalidParameter("levels", "n must be >= 0");
  }
  s.selection.n = s.n;
  s.selection.n_max = s.n_max;
  return s;
}

Scenario load_config(const std::filesystem::path& path, const Scenario& base, bool require_physics,
                     std::optional<OmegaUnit> unit_override) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw InvalidParameter("config", "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config(buffer.str(), base, require_physics, path.parent_path(), unit_override);
}

}  // namespace pmr
