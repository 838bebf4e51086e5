#include "twopulse/analytic.hpp"
#include "twopulse/config.hpp"
#include "twopulse/experiment.hpp"
#include "twopulse/verify.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace twopulse;
namespace fs = std::filesystem;

namespace {

const fs::path kScratch = TWOPULSE_SCRATCH_DIR;

ExperimentConfig small_config(const std::string& extra, const std::string& dir) {
  std::string text =
      "[medium]\nalpha2 = 0.8\nbeta2 = 0.2\n"
      "[grid]\nt_min = -10\nt_max = 20\ndt = 0.05\nz_min = -2\nz_max = 2\ndz = 0.1\n" + extra;
  auto out = parse_config(text);
  INFO((out.violations.empty() ? std::string{} : out.violations.front()));
  REQUIRE(out.config.has_value());
  out.config->output_dir = kScratch / dir;
  return *out.config;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + TWOPULSE_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_file(const std::string& name, const std::string& text) {
  fs::create_directories(kScratch);
  const auto p = kScratch / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("an analytic-only run writes the closed-form fields exactly") {
  const auto cfg = small_config("[run]\nsolver = analytic\nstations = 3\n", "analytic_only");
  const auto art = run_experiment(cfg);
  const auto q = make_doppler_quadrature(cfg.prep.delta_bar, cfg.prep.t2_star, 1);
  const auto sol = make_analytic_solution(cfg.prep, cfg.tau, q);
  const auto rows = read_csv(art.directory / "snapshots.csv");
  REQUIRE(rows.size() == 1 + 3 * static_cast<std::size_t>(cfg.grid.n_t));
  CHECK(rows[0][0] == "z_kappa");
  int checked = 0;
  for (std::size_t r = 1; r < rows.size(); r += 37) {
    const double z = std::stod(rows[r][0]) / cfg.kappa;
    const double t = std::stod(rows[r][1]);
    const auto f = analytic_fields(sol, z, t);
    CHECK(std::stod(rows[r][2]) == f.a.real());
    CHECK(std::stod(rows[r][3]) == f.a.imag());
    CHECK(std::stod(rows[r][4]) == f.b.real());
    CHECK(std::stod(rows[r][5]) == f.b.imag());
    ++checked;
  }
  CHECK(checked > 40);
}

TEST_CASE("numbers round-trip through text") {
  for (double x : {0.1, 1.0 / 3.0, -2.718281828459045e-300, 6.02214076e23})
    CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("runs are deterministic and write every artifact") {
  const auto a = run_experiment(small_config("[pulse_b]\narea_pi = 0.05\n[run]\nstations = 4\n", "det_a"));
  const auto b = run_experiment(small_config("[pulse_b]\narea_pi = 0.05\n[run]\nstations = 4\n", "det_b"));
  for (const char* name : {"snapshots.csv", "areas.csv"}) {
    const auto x = slurp(a.directory / name);
    CHECK_FALSE(x.empty());
    CHECK(x == slurp(b.directory / name));
    CHECK(x.find('\r') == std::string::npos);
  }
  for (int k = 0; k < 4; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "plot_%02d.svg", k);
    CHECK(fs::exists(a.directory / name));
  }
  const auto report = slurp(a.directory / "report.txt");
  for (const char* key : {"solver = full", "kappa = ", "poynting_residual_max_per_step = ",
                          "output_theta_b_pi = ", "pump_depletion = ", "peak_count_total = "})
    CHECK(report.find(key) != std::string::npos);
  CHECK(report_value(a.report, "poynting_residual_ok") == "yes");
}

TEST_CASE("verify passes on the default grid and flags a coarse one") {
  auto cfg = *parse_config("").config;
  const auto good = verify(cfg);
  for (const auto& c : good.checks) INFO(c.name << " " << c.value);
  CHECK(good.passed());

  auto coarse = *parse_config("[grid]\ndt = 0.2\n").config;
  const auto bad = verify(coarse);
  CHECK_FALSE(bad.passed());
  bool hinted = false;
  for (const auto& c : bad.checks)
    if (!c.passed && c.hint.find("reduce dt") != std::string::npos) hinted = true;
  CHECK(hinted);
  std::ostringstream table;
  write_verify_table(table, bad);
  CHECK(table.str().rfind("check,status,value,threshold,hint", 0) == 0);
}

TEST_CASE("command-line exit codes") {
  const auto ok = write_file("ok.cfg",
                             "[grid]\nt_min = -10\nt_max = 20\ndt = 0.05\nz_max = 1\ndz = 0.1\n"
                             "[run]\noutput_dir = " + (kScratch / "cli_ok").string() + "\n");
  CHECK(run_cli("simulate --quiet --config \"" + ok.string() + "\"") == 0);
  CHECK(fs::exists(kScratch / "cli_ok" / "report.txt"));
  CHECK(run_cli("areas --config \"" + ok.string() + "\" --out \"" + (kScratch / "cli_areas").string() + "\"") == 0);
  CHECK(fs::exists(kScratch / "cli_areas" / "areas_theory.csv"));

  const auto bad = write_file("bad.cfg", "[medium]\nalpha2 = 1.2\n");
  CHECK(run_cli("simulate --config \"" + bad.string() + "\"") == 1);
  CHECK(run_cli("simulate") == 1);
  CHECK(run_cli("simulate --config /nonexistent.cfg") == 1);

  const auto unstable = write_file(
      "unstable.cfg",
      "[medium]\ndelta_bar = 0\nmu = 50\n[pulse_a]\narea_pi = 0.5\n"
      "[grid]\nt_min = -10\nt_max = 20\ndt = 0.05\nz_max = 10\nn_z = 2\nscheme = midpoint\n"
      "[run]\noutput_dir = " + (kScratch / "cli_unstable").string() + "\n");
  CHECK(run_cli("simulate --config \"" + unstable.string() + "\"") == 2);

  const auto coarse = write_file("coarse.cfg", "[grid]\ndt = 0.2\n");
  CHECK(run_cli("verify --config \"" + coarse.string() + "\"") == 3);
  CHECK(run_cli("verify --quiet") == 0);
}
