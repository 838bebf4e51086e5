#include "oracles.hpp"
#include "twopulse/analytic.hpp"
#include "twopulse/diagnostics.hpp"
#include "twopulse/errors.hpp"
#include "twopulse/maxwell.hpp"

#include <doctest.h>

using namespace twopulse;

namespace {

SimulationGrid make_grid(TimeAxis t, double z_min, double z_max, int n_z,
                         std::vector<DopplerNode> doppler) {
  SimulationGrid g;
  g.t = t;
  g.z_min = z_min;
  g.z_max = z_max;
  g.n_z = n_z;
  g.doppler = std::move(doppler);
  return g;
}

FieldState sech_input(const TimeAxis& axis, double area_a, double area_b) {
  FieldState f;
  f.omega_a = sample_input_pulse({Channel::pump_a, PulseShape::sech, area_a, 1.0, 0.0, 0.0}, axis).envelope;
  f.omega_b = sample_input_pulse({Channel::stokes_b, PulseShape::sech, area_b, 1.0, 0.0, 0.0}, axis).envelope;
  return f;
}

std::vector<cplx> both(const FieldState& f) {
  auto v = f.omega_a;
  v.insert(v.end(), f.omega_b.begin(), f.omega_b.end());
  return v;
}

}  // namespace

TEST_CASE("fields pass unchanged through empty space") {
  const auto prep = make_medium(1.0, 0.0, 10.0, std::nullopt, 202.0, {100.0, 200.0});
  const auto grid = make_grid({-10.0, 30.0, 801}, 0.0, 1.0, 20, make_doppler_quadrature(10.0, std::nullopt, 1));
  const auto in = sech_input(grid.t, 2.0 * kPi, 0.01);
  for (auto scheme : {ZScheme::trapezoid, ZScheme::midpoint}) {
    PropagationSettings s;
    s.scheme = scheme;
    const auto r = propagate(in, prep, grid, s);
    CHECK(r.snapshots.back().fields.omega_a == in.omega_a);
    CHECK(r.snapshots.back().fields.omega_b == in.omega_b);
  }
}

TEST_CASE("a section of the two-pulse soliton is reproduced") {
  const auto q = make_doppler_quadrature(10.0, std::nullopt, 1);
  const auto prep = make_medium(1.0, 0.0, 10.0, std::nullopt, 202.0);
  const auto sol = make_analytic_solution(prep, 1.0, q);
  const TimeAxis axis{-15.0, 25.0, 2001};
  const auto grid = make_grid(axis, -1.0, 1.0, 40, q);
  const auto in = sample_analytic_fields(sol, -1.0, axis);
  const auto out = propagate(in, prep, grid).snapshots.back().fields;
  CHECK(out.z == doctest::Approx(1.0));
  const auto ref = sample_analytic_fields(sol, 1.0, axis);
  CHECK(oracle::relative_l2(both(out), both(ref)) < 1e-3);
}

TEST_CASE("a resonant 2 pi sech pulse keeps its Area and shape") {
  const auto q = make_doppler_quadrature(0.0, std::nullopt, 1);
  const auto prep = make_medium(1.0, 0.0, 0.0, std::nullopt, 1.0);
  const TimeAxis axis{-15.0, 25.0, 2001};
  const auto grid = make_grid(axis, 0.0, 5.0, 100, q);
  const auto in = sech_input(axis, 2.0 * kPi, 0.0);
  const auto out = propagate(in, prep, grid).snapshots.back().fields;
  CHECK(pulse_area(out.omega_a, axis) == doctest::Approx(2.0 * kPi).epsilon(1e-3));
  const auto fit = fit_sech(out.omega_a, axis);
  CHECK(fit.amplitude == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(fit.width == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(fit.center > 0.0);  // delayed by the medium
}

TEST_CASE("midpoint and trapezoid schemes agree on a broad line") {
  const auto q = make_doppler_quadrature(10.0, 0.3, 32);
  const auto prep = make_medium(1.0, 0.0, 10.0, 0.3, 1.0);
  const TimeAxis axis{-10.0, 20.0, 1501};
  const auto grid = make_grid(axis, 0.0, 2.0, 100, q);
  const auto in = sech_input(axis, 1.3 * kPi, 0.05 * kPi);
  PropagationSettings mid;
  mid.scheme = ZScheme::midpoint;
  const auto a = propagate(in, prep, grid).snapshots.back().fields;
  const auto b = propagate(in, prep, grid, mid).snapshots.back().fields;
  CHECK(oracle::relative_l2(both(b), both(a)) < 1e-3);
}

TEST_CASE("a Z step longer than the absorption length is reported") {
  const auto q = make_doppler_quadrature(0.0, std::nullopt, 1);
  const auto prep = make_medium(1.0, 0.0, 0.0, std::nullopt, 50.0);
  const TimeAxis axis{-10.0, 20.0, 601};
  const auto grid = make_grid(axis, 0.0, 4.0, 4, q);
  PropagationSettings mid;
  mid.scheme = ZScheme::midpoint;
  CHECK_THROWS_AS(propagate(sech_input(axis, 0.5 * kPi, 0.0), prep, grid, mid), ResolutionError);
}

TEST_CASE("non-finite input is a numerical failure") {
  const auto q = make_doppler_quadrature(10.0, std::nullopt, 1);
  const auto prep = make_medium(1.0, 0.0, 10.0, std::nullopt, 1.0);
  const TimeAxis axis{-10.0, 20.0, 301};
  auto in = sech_input(axis, kPi, 0.0);
  in.omega_b[10] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(propagate(in, prep, make_grid(axis, 0.0, 1.0, 10, q)), IntegrationFailure);
}

TEST_CASE("far-detuned classes get extra substeps") {
  PropagationSettings s;
  CHECK(class_substeps(10.0, 0.02, s) == 1);
  CHECK(class_substeps(-120.0, 0.02, s) == 3);
  s.substeps = 4;
  CHECK(class_substeps(-120.0, 0.02, s) == 4);
  s.stiff_phase_limit = 0.0;
  s.substeps = 2;
  CHECK(class_substeps(1e6, 0.02, s) == 2);
}

TEST_CASE("stations are snapped onto the Z grid") {
  const auto q = make_doppler_quadrature(10.0, std::nullopt, 1);
  const auto prep = make_medium(1.0, 0.0, 10.0, std::nullopt, 1.0);
  const TimeAxis axis{-10.0, 20.0, 301};
  PropagationSettings s;
  s.stations = {0.0, 0.52, 1.0};
  const auto r = propagate(sech_input(axis, kPi, 0.0), prep, make_grid(axis, 0.0, 1.0, 10, q), s);
  REQUIRE(r.snapshots.size() == 3);
  CHECK(r.snapshots[1].fields.z == doctest::Approx(0.5));
  CHECK(r.steps.size() == 11);
}
