#include "oracles.hpp"
#include "twopulse/bloch.hpp"
#include "twopulse/errors.hpp"

#include <doctest.h>

#include <random>

using namespace twopulse;

namespace {

std::vector<cplx> sampled(const TimeAxis& axis, auto&& f) {
  std::vector<cplx> v(axis.size());
  for (int i = 0; i < axis.n; ++i) v[i] = f(axis.at(i));
  return v;
}

cplx sech_pulse(double t, double area, double width, double centre, double phase = 0.0) {
  return std::polar(area / (kPi * width) / std::cosh((t - centre) / width), phase);
}

DensityMatrix3 random_state(std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix3cd a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a(r, c) = {g(rng), g(rng)};
  Eigen::Matrix3cd rho = a * a.adjoint();
  rho /= rho.trace();
  return DensityMatrix3(rho);
}

// Final density of one class driven by two sech pulses, sampled at step dt.
Eigen::Matrix3cd driven_final(double dt) {
  const int n = static_cast<int>(std::lround(24.0 / dt)) + 1;
  const TimeAxis axis{-12.0, 12.0, n};
  const auto a = sampled(axis, [](double t) { return sech_pulse(t, 1.5 * kPi, 1.0, 0.0); });
  const auto b = sampled(axis, [](double t) { return sech_pulse(t, 0.7 * kPi, 0.8, 0.5, 0.3); });
  const AtomClassState s{DensityMatrix3::diagonal(0.7, 0.3, 0.0), 2.0, 1.0};
  return integrate_atom(s, a, b, axis, 1).back().matrix();
}

}  // namespace

TEST_CASE("resonant Rabi oscillation of a constant pump") {
  const TimeAxis axis{0.0, 4.0 * kPi, 1257};
  const double omega = 1.0;
  const auto a = sampled(axis, [&](double) { return cplx{omega, 0.0}; });
  const std::vector<cplx> b(axis.size());
  const auto traj = integrate_atom({DensityMatrix3::diagonal(1, 0, 0), 0.0, 1.0}, a, b, axis, 1);
  double worst = 0.0;
  for (int i = 0; i < axis.n; ++i) {
    const double s = std::sin(0.5 * omega * axis.at(i));
    worst = std::max(worst, std::abs(traj[i](3, 3).real() - s * s));
  }
  CHECK(axis.dt() == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(worst < 1e-8);
}

TEST_CASE("a 2 pi sech pulse returns every detuning to the ground state") {
  const TimeAxis axis{-25.0, 25.0, 5001};
  const auto a = sampled(axis, [](double t) { return sech_pulse(t, 2.0 * kPi, 1.0, 0.0); });
  const std::vector<cplx> b(axis.size());
  for (double det : {0.0, 0.4, -1.3, 3.0}) {
    const auto traj = integrate_atom({DensityMatrix3::diagonal(1, 0, 0), det, 1.0}, a, b, axis, 1);
    CHECK(traj.back()(3, 3).real() < 1e-6);
    CHECK(traj.back()(1, 1).real() == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("time stepping is fourth order") {
  const auto ref = driven_final(0.0025);
  const double e1 = (driven_final(0.04) - ref).norm();
  const double e2 = (driven_final(0.02) - ref).norm();
  const double ratio = e1 / e2;
  INFO("errors " << e1 << " " << e2);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("integration preserves trace, hermiticity, positivity and purity") {
  std::mt19937 rng(20261019);
  std::uniform_real_distribution<double> area(0.1, 3.0 * kPi), width(0.5, 2.0), centre(-2.0, 2.0),
      phase(-kPi, kPi), det(-15.0, 15.0), pop(0.0, 1.0);
  // RK4 is not unitary: the per-step purity error scales as (phase per substep)^6,
  // so the steps are kept below 0.025 rad.
  const TimeAxis axis{-15.0, 15.0, 6001};
  for (int n = 0; n < 25; ++n) {
    const double aa = area(rng), wa = width(rng), ca = centre(rng), pa = phase(rng);
    const double ab = area(rng), wb = width(rng), cb = centre(rng), pb = phase(rng);
    const auto a = sampled(axis, [&](double t) { return sech_pulse(t, aa, wa, ca, pa); });
    const auto b = sampled(axis, [&](double t) { return sech_pulse(t, ab, wb, cb, pb); });
    const double d = det(rng);
    const AtomClassState s{n % 2 == 0 ? random_state(rng) : [&] {
      const double p = pop(rng);
      return DensityMatrix3::diagonal(p, 1.0 - p, 0.0);
    }(), d, 1.0};
    const double purity0 = s.rho.purity();
    const int m = std::max(1, static_cast<int>(std::ceil(std::abs(d) * axis.dt() / 0.025)));
    const auto traj = integrate_atom(s, a, b, axis, m);
    for (std::size_t i = 0; i < traj.size(); i += 500) {
      CHECK(traj[i].check(1e-8, 1e-8).empty());
      CHECK(traj[i].purity() == doctest::Approx(purity0).epsilon(1e-7));
    }
  }
}

TEST_CASE("right-hand side equals the literal commutator") {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  for (int n = 0; n < 50; ++n) {
    const auto rho = random_state(rng);
    const cplx a{g(rng), g(rng)}, b{g(rng), g(rng)};
    const double d = 5.0 * g(rng);
    const auto lib = bloch_rhs(rho, a, b, d).matrix();
    CHECK((lib - oracle::von_neumann(rho.matrix(), a, b, d)).norm() < 1e-14);
  }
}

TEST_CASE("atoms must be prepared well before the first pulse") {
  CHECK_THROWS_AS(check_leading_margin({-5.0, 20.0, 101}, 0.0, 1.0), InvalidParameter);
  CHECK_NOTHROW(check_leading_margin({-6.0, 20.0, 101}, 0.0, 1.0));
}

TEST_CASE("bad inputs are rejected") {
  const TimeAxis axis{0.0, 1.0, 11};
  std::vector<cplx> a(axis.size()), b(axis.size());
  const AtomClassState s{DensityMatrix3::diagonal(1, 0, 0), 0.0, 1.0};
  CHECK_THROWS_AS(integrate_atom(s, a, b, axis, 0), InvalidParameter);
  CHECK_THROWS_AS(integrate_atom(s, std::span<const cplx>(a).first(5), b, axis, 1), InvalidParameter);
  a[4] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(integrate_atom(s, a, b, axis, 1), IntegrationFailure);
}
