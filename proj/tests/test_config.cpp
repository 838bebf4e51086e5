#include "twopulse/config.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>

using namespace twopulse;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& text) {
  return std::any_of(v.begin(), v.end(), [&](const auto& s) { return s.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("a minimal config takes the documented defaults") {
  const auto out = parse_config("[medium]\nalpha2 = 1\n");
  REQUIRE(out.config.has_value());
  const auto& c = *out.config;
  CHECK(c.grid.doppler_nodes == 32);
  CHECK(c.grid.scheme == ZScheme::trapezoid);
  CHECK(c.grid.n_t == 2001);
  CHECK(c.grid.n_z == 200);
  CHECK(c.stations == 6);
  CHECK(c.solver == Solver::full);
  CHECK(c.prep.delta_bar == 10.0);
  CHECK(c.prep.sharp_line());
  CHECK(c.kappa == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.pulse_a.area == doctest::Approx(2.0 * kPi));
  // A sharp line integrates a single class whatever doppler_nodes says.
  CHECK(build_grid(c).doppler.size() == 1);
}

TEST_CASE("domain violations are reported with their section") {
  const auto out = parse_config("[medium]\nalpha2 = 1.2\n");
  CHECK_FALSE(out.config.has_value());
  CHECK(mentions(out.violations, "[medium] alpha2+beta2 must equal 1"));
}

TEST_CASE("unknown keys and sections are rejected and all violations collected") {
  const auto out = parse_config(
      "[medium]\nalpha2 = 1\nalfa2 = 1\n[pulses]\nx = 1\n[grid]\ndt = 0.02\nn_t = 100\n"
      "[pulse_a]\narea = 1\narea_pi = 1\n");
  CHECK_FALSE(out.config.has_value());
  CHECK(mentions(out.violations, "[medium] unknown key 'alfa2'"));
  CHECK(mentions(out.violations, "unknown section [pulses]"));
  CHECK(mentions(out.violations, "dt and n_t are mutually exclusive"));
  CHECK(mentions(out.violations, "area and area_pi are mutually exclusive"));
  CHECK(out.violations.size() >= 4);
}

TEST_CASE("steps must divide the axis") {
  CHECK(mentions(parse_config("[grid]\nt_min = 0\nt_max = 1\ndt = 0.3\n").violations,
                 "must divide the axis length evenly"));
  const auto ok = parse_config("[grid]\nt_min = 0\nt_max = 1\ndt = 0.25\nz_max = 2\nn_z = 8\n");
  REQUIRE(ok.config.has_value());
  CHECK(ok.config->grid.n_t == 5);
  CHECK(ok.config->grid.n_z == 8);
}

TEST_CASE("adiabatic runs need a detuned sharp line") {
  const auto out = parse_config("[medium]\nt2_star = 0.3\ndelta_bar = 0\n[run]\nsolver = adiabatic\n");
  CHECK(mentions(out.violations, "requires t2_star = sharp"));
  CHECK(mentions(out.violations, "requires delta_bar != 0"));
}

TEST_CASE("Z positions are read in kappa Z") {
  const auto out = parse_config(
      "[medium]\nmu = 404\nentry = 0\nexit = 8\n[grid]\nz_min = -2\nz_max = 10\n"
      "[run]\nstation_positions = 0, 4\n");
  REQUIRE(out.config.has_value());
  const auto& c = *out.config;
  CHECK(c.kappa == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c.prep.mask.entry == doctest::Approx(0.0));
  CHECK(c.prep.mask.exit == doctest::Approx(4.0));
  const auto g = build_grid(c);
  CHECK(g.z_min == doctest::Approx(-1.0));
  CHECK(g.z_max == doctest::Approx(5.0));
  const auto s = build_settings(c);
  REQUIRE(s.stations.size() == 2);
  CHECK(s.stations[1] == doctest::Approx(2.0));
}

TEST_CASE("the Raman-gain config has the stated parameters") {
  const auto c = load_config(std::filesystem::path(TWOPULSE_CONFIG_DIR) / "fig4_top.cfg");
  CHECK(c.pulse_a.area == doctest::Approx(1.3 * kPi));
  CHECK(c.pulse_b.area == doctest::Approx(0.005 * kPi));
  CHECK(c.pulse_a.shape == PulseShape::gaussian);
  CHECK(c.prep.delta_bar == 10.0);
  REQUIRE(c.prep.t2_star.has_value());
  CHECK(*c.prep.t2_star == 0.3);
  CHECK(c.prep.inversion() == 1.0);
  CHECK(build_grid(c).doppler.size() == 32);
}

TEST_CASE("every shipped config parses") {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(TWOPULSE_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    INFO(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path()));
    ++n;
  }
  CHECK(n >= 14);
}

TEST_CASE("missing files and syntax errors are config errors") {
  CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), ConfigError);
  CHECK_FALSE(parse_config("[medium\nalpha2 = 1\n").violations.empty());
  CHECK(mentions(parse_config("alpha2 = 1\n").violations, "outside any section"));
}
