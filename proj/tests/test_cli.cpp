#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "pmr/cli.hpp"
#include "pmr/constants.hpp"
#include "pmr/csv.hpp"

using namespace pmr;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pmr");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pmr_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const char* kGeneric = R"({"mass": 5e-27, "gamma": 2.0e8, "spin": 1, "omega": 4e4, "offset": 1e-8,
                           "b0": 1e-3, "g": 60, "gbar": 2e6, "n_max": 3})";

}  // namespace

TEST_CASE("spectrum of a spin-0 scenario is the bare oscillator ladder") {
  const auto dir = fresh_dir("spin0");
  write(dir / "s.json", R"({"mass": 1e-26, "gamma": 1e8, "spin": 0, "omega": 1e5, "offset": 0,
                           "b0": 1, "g": 3, "gbar": 50, "n_max": 3})");
  const auto r = run_cli({"spectrum", "--config", (dir / "s.json").string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto table = io::parse_csv(slurp(dir / "levels.csv"));
  CHECK(table.header == std::vector<std::string>{"M", "n", "energy_J", "energy_hbar_omega"});
  REQUIRE(table.rows.size() == 4);
  for (int n = 0; n < 4; ++n) {
    CHECK(std::stod(table.rows[n][2]) == doctest::Approx(constants::hbar * 1e5 * (n + 0.5)).epsilon(1e-15));
    CHECK(std::stod(table.rows[n][3]) == doctest::Approx(n + 0.5).epsilon(1e-15));
  }
}

TEST_CASE("exit codes") {
  const auto dir = fresh_dir("codes");
  SUBCASE("dissociation exits 3 and names the worst M") {
    write(dir / "d.json", R"({"mass": 5e-27, "gamma": -2.0e8, "spin": 1.5, "omega": 4e4, "offset": 0,
                             "b0": 0, "g": 0, "gbar": 1e12})");
    const auto r = run_cli({"spectrum", "--config", (dir / "d.json").string(), "--out", dir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.rfind("ERROR 3: ", 0) == 0);
    CHECK(r.err.find("dissociation") != std::string::npos);
    CHECK(r.err.find("M=-1.5") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "levels.csv"));
    CHECK(run_cli({"lines", "--config", (dir / "d.json").string(), "--out", dir.string()}).code == 3);
    CHECK(run_cli({"validate", "--config", (dir / "d.json").string(), "--out", dir.string()}).code == 3);
  }
  SUBCASE("config errors exit 2 naming the parameter") {
    write(dir / "bad.json", R"({"mass": 5e-27, "gamma": 2e8, "spin": 1, "omega": -4, "offset": 0,
                               "b0": 0, "g": 0, "gbar": 0})");
    const auto r = run_cli({"spectrum", "--config", (dir / "bad.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("omega") != std::string::npos);
    CHECK(run_cli({"spectrum"}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"spectrum", "--config", (dir / "absent.json").string()}).code == 2);
    write(dir / "ok.json", kGeneric);
    CHECK(run_cli({"spectrum", "--config", (dir / "ok.json").string(), "--format", "xml"}).code == 2);
    CHECK(run_cli({"spectrum", "--config", (dir / "ok.json").string(), "--omega-unit", "rpm"}).code == 2);
  }
  SUBCASE("help") { CHECK(run_cli({"--help"}).code == 0); }
  fs::remove_all(dir);
}

TEST_CASE("validate writes a passing report") {
  const auto dir = fresh_dir("validate");
  write(dir / "s.json", kGeneric);
  const auto r = run_cli({"validate", "--config", (dir / "s.json").string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "validation.json"));
  CHECK(doc["passed"] == true);
  CHECK(doc["max_relative_error"].get<double>() < 1e-8);
  CHECK(doc["levels"].size() == 12);
  CHECK(doc["sectors"].size() == 3);
  fs::remove_all(dir);
}

TEST_CASE("lines feed back into invert") {
  const auto dir = fresh_dir("invert");
  write(dir / "s.json", R"({"mass": 5e-27, "gamma": 2.0e8, "spin": 1.5, "omega": 4e4, "offset": 1e-8,
                           "b0": 1e-3, "g": 60, "gbar": 2e6, "n": 1, "bracket_min": 1e3, "bracket_max": 1e6,
                           "measured_lines": "lines.csv"})");
  REQUIRE(run_cli({"lines", "--config", (dir / "s.json").string(), "--out", dir.string()}).code == 0);
  const auto lines = io::read_line_list(dir / "lines.csv");
  CHECK(lines.size() == 3);
  const auto r = run_cli({"invert", "--config", (dir / "s.json").string(), "--out", dir.string(), "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "inversion.json"));
  CHECK(doc["identifiable"] == true);
  CHECK(doc["omega_estimate_rad_s"].get<double>() == doctest::Approx(4e4).epsilon(1e-6));

  // explicit --lines, CSV output
  const auto csv = run_cli({"invert", "--config", (dir / "s.json").string(), "--out", dir.string(), "--lines",
                           (dir / "lines.csv").string()});
  CHECK(csv.code == 0);
  CHECK(fs::exists(dir / "inversion.csv"));

  write(dir / "h.json", R"({"mass": 5e-27, "gamma": 2.0e8, "spin": 1.5, "omega": 4e4, "offset": 0,
                           "b0": 0.2, "g": 0, "gbar": 0, "bracket_min": 1e3, "bracket_max": 1e6})");
  REQUIRE(run_cli({"lines", "--config", (dir / "h.json").string(), "--out", (dir / "h").string()}).code == 0);
  const auto flat = run_cli({"invert", "--config", (dir / "h.json").string(), "--out", (dir / "h").string(),
                             "--lines", (dir / "h" / "lines.csv").string(), "--format", "json"});
  CHECK(flat.code == 3);
  CHECK(flat.err.find("homogeneous") != std::string::npos);
  const auto flat_doc = nlohmann::json::parse(slurp(dir / "h" / "inversion.json"));
  CHECK(flat_doc["identifiable"] == false);
  CHECK(flat_doc["omega_estimate_rad_s"].is_null());
  fs::remove_all(dir);
}

TEST_CASE("crossings and figure1 outputs") {
  const auto dir = fresh_dir("figure1");
  const auto r = run_cli({"figure1", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto levels = io::parse_csv(slurp(dir / "figure1_levels.csv"));
  CHECK(levels.header.size() == 1 + 4 * 3);
  CHECK(levels.header[1] == "E_M=-1.5_n=0");
  CHECK(levels.rows.size() == 401);
  const auto crossings = io::parse_csv(slurp(dir / "figure1_crossings.csv"));
  CHECK(crossings.header == std::vector<std::string>{"gbar", "M_a", "n_a", "M_b", "n_b", "energy_J"});
  CHECK_FALSE(crossings.rows.empty());
  CHECK(fs::exists(dir / "figure1_lines.csv"));

  write(dir / "c.json", R"({"mass": 5e-27, "gamma": 2.0e8, "spin": 1, "omega": 4e4, "offset": 0,
                           "b0": 0, "g": 0, "gbar": 0, "n_max": 0, "gbar_min": 0, "gbar_max": 0})");
  const auto degenerate = run_cli({"crossings", "--config", (dir / "c.json").string(), "--out", dir.string()});
  CHECK(degenerate.code == 0);
  CHECK(degenerate.out.find("degenerate, no isolated crossings") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("repeated runs are byte-identical") {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  write(a / "s.json", kGeneric);
  for (const auto& dir : {a, b}) {
    for (const std::string cmd : {"spectrum", "lines", "crossings"}) {
      REQUIRE(run_cli({cmd, "--config", (a / "s.json").string(), "--out", dir.string()}).code == 0);
      REQUIRE(run_cli({cmd, "--config", (a / "s.json").string(), "--out", (dir / "json").string(), "--format", "json"})
                  .code == 0);
    }
  }
  for (const std::string f : {"levels.csv", "lines.csv", "crossings.csv", "json/levels.json", "json/lines.json",
                              "json/crossings.json"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("installed binary honours the exit-code contract") {
  const auto dir = fresh_dir("binary");
  const std::string exe = PMR_CLI_PATH;
  const int ok = std::system((exe + " figure1 --out " + dir.string() + " > /dev/null").c_str());
  CHECK(WEXITSTATUS(ok) == 0);
  const int bad = std::system((exe + " nonsense 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
  fs::remove_all(dir);
}
