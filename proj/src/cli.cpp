#include "pmr/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pmr/constants.hpp"
#include "pmr/csv.hpp"
#include "pmr/errors.hpp"
#include "pmr/oracle.hpp"
#include "pmr/scenario.hpp"
#include "pmr/spectroscopy.hpp"
#include "pmr/spectrum.hpp"

namespace pmr::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::string omega_unit;
  std::string format = "csv";
  std::string lines;
};

struct Context {
  Options opts;
  std::ostream& out;
};

std::optional<OmegaUnit> unit_override(const Options& o) {
  if (o.omega_unit.empty()) return std::nullopt;
  return parse_omega_unit(o.omega_unit);
}

Scenario load_required(const Options& o) {
  if (o.config.empty()) throw InvalidParameter("config", "--config <path> is required for this command");
  return load_config(o.config, Scenario{}, true, unit_override(o));
}

fs::path output_dir(const Options& o) {
  const fs::path dir = o.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InvalidParameter("out", "cannot create output directory " + dir.string());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw InvalidParameter("out", "cannot write " + path.string());
  file << text;
  if (!file) throw InvalidParameter("out", "write failed for " + path.string());
}

void write_json(const fs::path& path, const ordered_json& doc) { write_text(path, doc.dump(2) + "\n"); }

bool want_json(const Options& o) {
  if (o.format == "csv") return false;
  if (o.format == "json") return true;
  throw InvalidParameter("format", "expected csv or json, got '" + o.format + "'");
}

void require_stable(const Scenario& s) {
  const auto report = stability_check(s.system, s.field);
  if (!report.stable) {
    throw DissociationError(report.worst_m, report.worst_mbar,
                            "|gbar| reaches the critical value " + io::format_real(report.gbar_crit) + " T/m^2");
  }
}

ordered_json level_json(const LevelLabel& l) { return ordered_json{{"M", l.m.value()}, {"n", l.n}}; }

int cmd_spectrum(const Context& ctx) {
  const auto s = load_required(ctx.opts);
  require_stable(s);
  const double unit = constants::hbar * s.system.omega;
  std::vector<EnergyLevel> levels;
  for (const auto m : s.system.projections()) {
    for (int n = 0; n <= s.n_max; ++n) levels.push_back({m, n, energy_level(s.system, s.field, m, n)});
  }
  const auto dir = output_dir(ctx.opts);
  if (want_json(ctx.opts)) {
    ordered_json arr = ordered_json::array();
    for (const auto& l : levels) {
      arr.push_back({{"M", l.m.value()}, {"n", l.n}, {"energy_J", l.energy}, {"energy_hbar_omega", l.energy / unit}});
    }
    write_json(dir / "levels.json", ordered_json{{"levels", arr}});
    ctx.out << "wrote " << (dir / "levels.json").string() << " (" << levels.size() << " levels)\n";
  } else {
    io::write_csv(io::level_table(levels, unit), dir / "levels.csv");
    ctx.out << "wrote " << (dir / "levels.csv").string() << " (" << levels.size() << " levels)\n";
  }
  return kOk;
}

ordered_json lines_json(const std::vector<TransitionLine>& lines) {
  ordered_json arr = ordered_json::array();
  for (const auto& l : lines) {
    arr.push_back({{"from", level_json(l.from)},
                   {"to", level_json(l.to)},
                   {"delta_e_J", l.delta_e},
                   {"freq_hz", l.frequency_hz},
                   {"freq_rad_s", l.frequency_rad}});
  }
  return arr;
}

int cmd_lines(const Context& ctx) {
  const auto s = load_required(ctx.opts);
  const auto lines = transition_lines(s.system, s.field, s.selection);
  const auto dir = output_dir(ctx.opts);
  if (want_json(ctx.opts)) {
    write_json(dir / "lines.json", ordered_json{{"lines", lines_json(lines)}});
    ctx.out << "wrote " << (dir / "lines.json").string() << " (" << lines.size() << " lines)\n";
  } else {
    io::write_csv(io::line_table(lines), dir / "lines.csv");
    ctx.out << "wrote " << (dir / "lines.csv").string() << " (" << lines.size() << " lines)\n";
  }
  return kOk;
}

std::pair<double, double> scan_range(const Scenario& s) {
  const auto report = stability_check(s.system, s.field);
  const double lo = s.gbar_min.value_or(0.0);
  double hi = 0.0;
  if (s.gbar_max) {
    hi = *s.gbar_max;
  } else if (std::isfinite(report.gbar_crit)) {
    hi = 0.999 * report.gbar_crit;
  } else {
    throw InvalidParameter("gbar_max", "required when the critical gradient is unbounded");
  }
  return {lo, hi};
}

void report_scan(const Context& ctx, const CrossingScan& scan) {
  ctx.out << "scanned gbar in [" << io::format_real(scan.gbar_min) << ", " << io::format_real(scan.gbar_max)
          << "] T/m^2: " << scan.crossings.size() << " crossings\n";
  for (const auto& p : scan.degenerate_pairs) {
    ctx.out << "degenerate, no isolated crossings: (M=" << p.a.m.to_string() << ", n=" << p.a.n << ") and (M="
            << p.b.m.to_string() << ", n=" << p.b.n << ")\n";
  }
  for (const auto& t : scan.possible_tangencies) {
    ctx.out << "possible tangency at gbar=" << io::format_real(t.gbar) << ": (M=" << t.level_a.m.to_string()
            << ", n=" << t.level_a.n << ") and (M=" << t.level_b.m.to_string() << ", n=" << t.level_b.n << ")\n";
  }
}

int cmd_crossings(const Context& ctx) {
  const auto s = load_required(ctx.opts);
  const auto levels = s.scan_levels();
  const auto scan = crossing_scan(s.system, s.field, scan_range(s), levels, s.steps);
  const auto dir = output_dir(ctx.opts);
  if (want_json(ctx.opts)) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : scan.crossings) {
      arr.push_back({{"gbar", c.gbar},
                     {"a", level_json(c.level_a)},
                     {"b", level_json(c.level_b)},
                     {"energy_J", c.energy},
                     {"bracket_width", c.bracket_width}});
    }
    ordered_json degenerate = ordered_json::array();
    for (const auto& p : scan.degenerate_pairs) degenerate.push_back({level_json(p.a), level_json(p.b)});
    write_json(dir / "crossings.json", ordered_json{{"gbar_min", scan.gbar_min},
                                                    {"gbar_max", scan.gbar_max},
                                                    {"crossings", arr},
                                                    {"degenerate_pairs", degenerate}});
  } else {
    io::write_csv(io::crossing_table(scan.crossings), dir / "crossings.csv");
  }
  report_scan(ctx, scan);
  return kOk;
}

int cmd_invert(const Context& ctx) {
  const auto s = load_required(ctx.opts);
  fs::path lines_path;
  if (!ctx.opts.lines.empty()) {
    lines_path = ctx.opts.lines;
  } else if (s.measured_lines) {
    lines_path = *s.measured_lines;
  } else {
    throw InvalidParameter("measured_lines", "give --lines <csv> or measured_lines in the config");
  }
  if (!s.bracket) throw InvalidParameter("bracket_min", "bracket_min and bracket_max are required");
  const auto lines = io::read_line_list(lines_path);
  const auto result = identify_frequency(lines, s.system, s.field, s.n, *s.bracket);

  const auto dir = output_dir(ctx.opts);
  const auto or_null = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
  if (want_json(ctx.opts)) {
    write_json(dir / "inversion.json",
               ordered_json{{"identifiable", result.identifiable},
                            {"omega_estimate_rad_s", or_null(result.omega_estimate)},
                            {"omega_estimate_hz", or_null(result.omega_estimate / constants::two_pi)},
                            {"residual_rms_hz", or_null(result.residual_rms)},
                            {"bracket_rad_s", {result.bracket.first, result.bracket.second}},
                            {"reason", result.reason}});
  } else {
    io::CsvTable t{{"identifiable", "omega_estimate_rad_s", "residual_rms_hz", "bracket_min", "bracket_max"}, {}};
    t.rows.push_back({result.identifiable ? "true" : "false", io::format_real(result.omega_estimate),
                      io::format_real(result.residual_rms), io::format_real(result.bracket.first),
                      io::format_real(result.bracket.second)});
    io::write_csv(t, dir / "inversion.csv");
  }
  if (!result.identifiable) throw DomainError(result.reason);
  ctx.out << "omega = " << io::format_real(result.omega_estimate) << " rad/s (rms residual "
          << io::format_real(result.residual_rms) << " Hz)\n";
  return kOk;
}

ordered_json validation_json(const ValidationReport& report) {
  ordered_json levels = ordered_json::array();
  for (const auto& l : report.levels) {
    levels.push_back({{"M", l.m.value()},
                      {"n", l.n},
                      {"analytic_J", l.analytic_j},
                      {"numeric_J", l.numeric_j},
                      {"relative_error", l.relative_error}});
  }
  ordered_json sectors = ordered_json::array();
  for (const auto& s : report.sectors) {
    ordered_json history = ordered_json::array();
    for (const auto& step : s.history) {
      history.push_back({{"n_points", step.n_points}, {"raw_hbar_omega", step.raw}, {"extrapolated_hbar_omega", step.extrapolated}});
    }
    sectors.push_back({{"M", s.m.value()},
                       {"grid", {{"u_min", s.grid.u_min}, {"u_max", s.grid.u_max}, {"n_points", s.grid.n_points},
                                 {"length_unit_m", s.grid.length_unit}}},
                       {"converged", s.converged},
                       {"observed_order", s.observed_order},
                       {"center_analytic_m", s.center_analytic_m},
                       {"center_oracle_m", s.center_oracle_m},
                       {"refinements", history}});
  }
  return ordered_json{{"tolerance", report.tolerance},
                      {"converged", report.converged},
                      {"max_relative_error", report.max_relative_error},
                      {"passed", report.passed()},
                      {"levels", levels},
                      {"sectors", sectors}};
}

int cmd_validate(const Context& ctx) {
  const auto s = load_required(ctx.opts);
  require_stable(s);
  const auto report = validate_spectrum(s.system, s.field, s.n_max + 1, s.tolerance, worker_threads());
  const auto dir = output_dir(ctx.opts);
  write_json(dir / "validation.json", validation_json(report));
  ctx.out << "max relative error " << io::format_real(report.max_relative_error) << " over "
          << report.levels.size() << " levels (tolerance " << io::format_real(report.tolerance) << ")\n";
  if (!report.passed()) {
    throw ConvergenceError("validation max relative error " + io::format_real(report.max_relative_error) +
                           " exceeds tolerance " + io::format_real(report.tolerance));
  }
  return kOk;
}

int cmd_figure1(const Context& ctx) {
  Scenario base = figure1_defaults();
  const auto unit = unit_override(ctx.opts);
  if (unit == OmegaUnit::hz) base.system.omega *= constants::two_pi;
  const auto s = ctx.opts.config.empty() ? base : load_config(ctx.opts.config, base, false, unit);

  const auto levels = s.scan_levels();
  const auto range = scan_range(s);
  const auto scan = crossing_scan(s.system, s.field, range, levels, s.steps);

  io::CsvTable curves{{"gbar"}, {}};
  for (const auto& l : levels) curves.header.push_back("E_M=" + l.m.to_string() + "_n=" + std::to_string(l.n));
  io::CsvTable lines{{"gbar", "n", "M_from", "M_to", "delta_e_J", "freq_hz"}, {}};
  for (int i = 0; i <= s.steps; ++i) {
    FieldProfile f = s.field;
    f.gbar = scan.gbar_min + (scan.gbar_max - scan.gbar_min) * i / s.steps;
    std::vector<std::string> row{io::format_real(f.gbar)};
    for (const auto& l : levels) row.push_back(io::format_real(energy_level(s.system, f, l.m, l.n)));
    curves.rows.push_back(std::move(row));
    for (int n = 0; n <= s.n_max; ++n) {
      LineSelection sel;
      sel.n = n;
      for (const auto& line : transition_lines(s.system, f, sel)) {
        lines.rows.push_back({io::format_real(f.gbar), std::to_string(n), line.from.m.to_string(),
                              line.to.m.to_string(), io::format_real(line.delta_e), io::format_real(line.frequency_hz)});
      }
    }
  }
  const auto dir = output_dir(ctx.opts);
  io::write_csv(curves, dir / "figure1_levels.csv");
  io::write_csv(io::crossing_table(scan.crossings), dir / "figure1_crossings.csv");
  io::write_csv(lines, dir / "figure1_lines.csv");
  ctx.out << "wrote figure1_levels.csv, figure1_crossings.csv, figure1_lines.csv in " << dir.string() << "\n";
  report_scan(ctx, scan);
  return kOk;
}

int fail(std::ostream& err, int code, const std::string& detail) {
  err << "ERROR " << code << ": " << detail << "\n";
  return code;
}

}  // namespace

unsigned worker_threads() {
  const char* env = std::getenv("PARABOLIC_MR_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) throw InvalidParameter("PARABOLIC_MR_THREADS", "must be a nonnegative integer");
  return static_cast<unsigned>(v);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spin-oscillator spectra in a parabolic magnetic field", args.empty() ? "pmr" : args.front()};
  app.require_subcommand(1);
  app.fallthrough();
  Options opts;
  app.add_option("--config", opts.config, "Scenario file (JSON)");
  app.add_option("--out", opts.out, "Output directory")->capture_default_str();
  app.add_option("--omega-unit", opts.omega_unit, "Unit of omega in the config: rad/s or Hz");
  app.add_option("--format", opts.format, "csv or json")->capture_default_str();

  using Handler = int (*)(const Context&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands{
      {"spectrum", "Energy levels E(M, n) for n <= n_max", cmd_spectrum},
      {"lines", "Transition lines for the configured selection rule", cmd_lines},
      {"crossings", "Level crossings along a gbar scan", cmd_crossings},
      {"invert", "Recover omega from measured DeltaM = 1 lines", cmd_invert},
      {"validate", "Compare closed-form levels with the finite-difference oracle", cmd_validate},
      {"figure1", "Level diagram versus gbar for the S = 3/2 EMR configuration", cmd_figure1},
  };
  for (const auto& [name, help, handler] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (name == "invert") sub->add_option("--lines", opts.lines, "Measured line list (lines.csv schema)");
  }

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rest);
  } catch (const CLI::Success& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, kConfigError, e.what());
  }

  try {
    const Context ctx{opts, out};
    for (const auto& [name, help, handler] : commands) {
      if (app.got_subcommand(name)) return handler(ctx);
    }
    return fail(err, kConfigError, "no subcommand");
  } catch (const InvalidParameter& e) {
    return fail(err, kConfigError, e.what());
  } catch (const DomainError& e) {
    return fail(err, kDomainError, e.what());
  } catch (const ConvergenceError& e) {
    return fail(err, kNumericalError, e.what());
  } catch (const std::exception& e) {
    return fail(err, kInternal, std::string("internal: ") + e.what());
  }
}

}  // namespace pmr::cli
