#include "twopulse/analytic.hpp"
#include "twopulse/diagnostics.hpp"
#include "twopulse/errors.hpp"

#include <doctest.h>

#include <random>

using namespace twopulse;

namespace {

std::vector<cplx> sech_env(const TimeAxis& axis, double amp, double width, double centre) {
  std::vector<cplx> v(axis.size());
  for (int i = 0; i < axis.n; ++i) v[i] = amp / std::cosh((axis.at(i) - centre) / width);
  return v;
}

PropagationCoefficients coeffs(double kappa) { return {kappa, 0.0, 1.0}; }

}  // namespace

TEST_CASE("measured Areas of sampled envelopes") {
  const TimeAxis axis{-80.0, 80.0, 16001};
  FieldState f;
  f.omega_a = sech_env(axis, 2.0, 1.0, 0.0);  // Area 2 pi
  f.omega_b = sech_env(axis, 0.5, 2.0, 3.0);  // Area pi
  for (auto& x : f.omega_b) x *= std::polar(1.0, 0.4);
  const auto r = measured_areas(f, axis);
  CHECK(r.theta_a == doctest::Approx(2.0 * kPi).epsilon(1e-10));
  CHECK(r.theta_b == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(r.theta_total == doctest::Approx(std::sqrt(5.0) * kPi).epsilon(1e-10));
  CHECK(pulse_area_abs(f.omega_b, axis) == doctest::Approx(kPi).epsilon(1e-10));
}

TEST_CASE("theoretical Areas keep a 2 pi total") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> a2(0.0, 1.0), z(-300.0, 300.0), k(0.1, 5.0);
  for (int n = 0; n < 200; ++n) {
    const double alpha2 = a2(rng);
    const auto prep = make_medium(alpha2, 1.0 - alpha2, 10.0, std::nullopt);
    const double zz = z(rng), kk = k(rng);
    const auto r = theoretical_areas(prep, coeffs(kk), zz);
    CHECK(r.theta_total == doctest::Approx(2.0 * kPi).epsilon(1e-12));
    const double h = std::sqrt(1.0 + std::exp(std::clamp(2.0 * (2.0 * alpha2 - 1.0) * kk * zz, -700.0, 700.0)));
    CHECK(r.theta_a == doctest::Approx(2.0 * kPi / h).epsilon(1e-12));
  }
  const auto sym = theoretical_areas(make_medium(0.5, 0.5, 10.0, std::nullopt), coeffs(1.0), 3.0);
  CHECK(sym.theta_a == doctest::Approx(std::sqrt(2.0) * kPi));
}

TEST_CASE("transfer length") {
  const auto prep = make_medium(1.0, 0.0, 10.0, std::nullopt);
  const double l = transfer_length(prep, coeffs(2.0), 0.005 * kPi);
  CHECK(l == doctest::Approx(std::log(400.0 * 400.0 - 1.0) / 4.0));
  // The theoretical curves cross at Z = 0.
  const auto at = theoretical_areas(prep, coeffs(2.0), 0.0);
  CHECK(at.theta_a == doctest::Approx(at.theta_b));
  const auto swapped = make_medium(0.2, 0.8, 10.0, std::nullopt);
  const auto direct = make_medium(0.8, 0.2, 10.0, std::nullopt);
  CHECK(transfer_length(swapped, coeffs(1.0), 0.3) == doctest::Approx(-transfer_length(direct, coeffs(1.0), 0.3)));
  CHECK_THROWS_AS(transfer_length(make_medium(0.5, 0.5, 10.0, std::nullopt), coeffs(1.0), 0.3),
                  DegenerateInversion);
  CHECK_THROWS_AS(transfer_length(prep, coeffs(1.0), 2.0 * kPi), InvalidParameter);
  CHECK_THROWS_AS(transfer_length(prep, coeffs(1.0), 0.0), InvalidParameter);
}

TEST_CASE("sech and Gaussian fits recover their parameters") {
  const TimeAxis axis{-20.0, 30.0, 2501};
  const auto s = fit_sech(sech_env(axis, 1.7, 1.3, 4.2), axis);
  CHECK(s.amplitude == doctest::Approx(1.7).epsilon(1e-6));
  CHECK(s.width == doctest::Approx(1.3).epsilon(1e-6));
  CHECK(s.center == doctest::Approx(4.2).epsilon(1e-6));
  CHECK(s.rms_misfit < 1e-6);
  CHECK(s.tail_slope == doctest::Approx(1.0 / 1.3).epsilon(1e-2));

  std::vector<cplx> g(axis.size());
  for (int i = 0; i < axis.n; ++i) g[i] = 0.8 * std::exp(-0.5 * std::pow((axis.at(i) + 1.0) / 2.0, 2));
  const auto gf = fit_gaussian(g, axis);
  CHECK(gf.width == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(gf.center == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(fit_sech(g, axis).rms_misfit > 10.0 * gf.rms_misfit);

  auto two = sech_env(axis, 1.0, 1.0, 0.0);
  const auto other = sech_env(axis, 0.8, 1.0, 10.0);
  for (std::size_t i = 0; i < two.size(); ++i) two[i] += other[i];
  CHECK_THROWS_AS(fit_sech(two, axis), NotSinglePulse);
  CHECK(peak_count(two) == 2);
}

TEST_CASE("peak counting") {
  CHECK(peak_count(std::vector<double>{0, 1, 2, 2, 2, 1, 0}) == 1);  // plateau
  CHECK(peak_count(std::vector<double>{0, 1, 0, 0.05, 0, 0.5, 0}) == 2);  // small bump below 10%
  CHECK(peak_count(std::vector<double>{3, 2, 1, 0}) == 1);  // edge maximum
  CHECK(peak_count(std::vector<double>(10, 0.0)) == 0);
}

TEST_CASE("peak position and group delay per unit Z") {
  const TimeAxis axis{-10.0, 30.0, 401};
  std::vector<FieldState> snaps;
  for (int k = 0; k < 5; ++k) {
    FieldState f;
    f.z = 0.5 * k;
    f.omega_a = sech_env(axis, 1.0, 1.0, 0.37 + 3.0 * f.z);
    f.omega_b.assign(axis.size(), 0.0);
    snaps.push_back(f);
  }
  CHECK(peak_position(snaps[0].omega_a, axis) == doctest::Approx(0.37).epsilon(1e-2));
  CHECK(group_velocity(snaps, Channel::pump_a, axis) == doctest::Approx(3.0).epsilon(1e-2));
}

TEST_CASE("flux balance of a step through empty space is zero") {
  const TimeAxis axis{-10.0, 10.0, 201};
  FieldState a, b;
  a.omega_a = sech_env(axis, 1.0, 1.0, 0.0);
  a.omega_b = sech_env(axis, 0.3, 1.0, 1.0);
  b = a;
  b.z = 0.1;
  const std::vector<double> zero(axis.size(), 0.0);
  const auto r = flux_residual_step(a, b, zero, zero, 5.0, axis);
  CHECK(r.per_step_max == 0.0);
  CHECK(r.per_step_l2 == 0.0);
  CHECK_THROWS_AS(flux_residual_step(b, a, zero, zero, 5.0, axis), InvalidParameter);
}

TEST_CASE("area parity is interpolated between steps") {
  std::vector<StepRecord> steps{{0.0, 2.0, 0.1, 0, 0}, {1.0, 1.5, 0.5, 0, 0}, {2.0, 0.5, 1.5, 0, 0}};
  const auto z = area_parity_location(steps);
  REQUIRE(z.has_value());
  CHECK(*z == doctest::Approx(1.5));
  steps.pop_back();
  CHECK_FALSE(area_parity_location(steps).has_value());
}

TEST_CASE("depletion and envelope discrepancy") {
  const TimeAxis axis{-20.0, 20.0, 401};
  FieldState in, out1, out2;
  in.omega_a = sech_env(axis, 2.0, 1.0, 0.0);
  in.omega_b.assign(axis.size(), 0.0);
  out1 = in;
  for (auto& x : out1.omega_a) x *= 0.5;
  CHECK(pump_depletion(in, out1, axis) == doctest::Approx(0.75));
  out2 = in;
  // |out1 - out2| on the pump is half the input; nothing on the Stokes.
  CHECK(envelope_discrepancy(out1, out2, in) == doctest::Approx(0.5));
  const auto tot = total_envelope(in);
  CHECK(tot[200] == doctest::Approx(2.0));
}
