#include "oracles.hpp"
#include "twopulse/domain.hpp"
#include "twopulse/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace twopulse;

TEST_CASE("medium validation lists every violation") {
  MediumPrep bad{-0.1, 0.5, 0.0, std::nullopt, 1.0, {}};
  const auto v = violations(bad);
  CHECK(v.size() == 2);
  CHECK(std::find(v.begin(), v.end(), "alpha2 must be >= 0") != v.end());
  CHECK(std::find(v.begin(), v.end(), "alpha2+beta2 must equal 1") != v.end());

  CHECK_THROWS_AS(make_medium(1.2, 0.0, 10.0, std::nullopt), InvalidParameter);
  CHECK_THROWS_AS(make_medium(1.0, 0.0, 10.0, -1.0), InvalidParameter);
  CHECK_THROWS_AS(make_medium(1.0, 0.0, 10.0, std::nullopt, 1.0, {5.0, 1.0}), InvalidParameter);
  CHECK_NOTHROW(make_medium(0.6, 0.4, -3.0, 0.3, 2.0, {0.0, 10.0}));
}

TEST_CASE("medium mask is half open") {
  const MediumMask m{0.0, 2.0};
  CHECK(m.occupied(0.0));
  CHECK(m.occupied(1.999));
  CHECK_FALSE(m.occupied(2.0));
  CHECK_FALSE(m.occupied(-1e-12));
  CHECK(MediumMask{}.occupied(1e300));
}

TEST_CASE("sharp line is a single node") {
  const auto q = make_doppler_quadrature(7.0, std::nullopt, 1);
  REQUIRE(q.size() == 1);
  CHECK(q[0].detuning == 7.0);
  CHECK(q[0].weight == 1.0);
  CHECK_THROWS_AS(make_doppler_quadrature(7.0, std::nullopt, 4), InvalidParameter);
  CHECK_THROWS_AS(make_doppler_quadrature(7.0, 0.3, 0), InvalidParameter);
}

TEST_CASE("Doppler quadrature reproduces Gaussian line averages") {
  const double delta_bar = 10.0, t2 = 0.3;
  const auto q = make_doppler_quadrature(delta_bar, t2, 32);
  double sum = 0.0, mean = 0.0, var = 0.0;
  for (const auto& n : q) {
    CHECK(n.weight > 0.0);
    sum += n.weight;
    mean += n.weight * n.detuning;
  }
  for (const auto& n : q) var += n.weight * (n.detuning - mean) * (n.detuning - mean);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mean == doctest::Approx(delta_bar).epsilon(1e-12));
  CHECK(var == doctest::Approx(1.0 / (t2 * t2)).epsilon(1e-12));
  CHECK(std::is_sorted(q.begin(), q.end(),
                       [](const auto& a, const auto& b) { return a.detuning < b.detuning; }));

  // A smooth average against adaptive Simpson on the Gaussian line shape.
  const auto g = [](double d) { return std::cos(0.3 * d) / (1.0 + 0.01 * d * d); };
  double gh = 0.0;
  for (const auto& n : q) gh += n.weight * g(n.detuning);
  const double ref = oracle::adaptive_simpson(
      [&](double d) { return oracle::line_shape(d, delta_bar, t2) * g(d); }, delta_bar - 40.0,
      delta_bar + 40.0);
  CHECK(gh == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("density matrix invariants") {
  const auto rho = DensityMatrix3::diagonal(0.6, 0.4, 0.0);
  CHECK(rho.check().empty());
  CHECK(rho.trace().real() == doctest::Approx(1.0));
  CHECK(rho.purity() == doctest::Approx(0.52));

  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(0, 1) = cplx{0.1, 0.2};  // not mirrored
  CHECK_FALSE(DensityMatrix3(m).check().empty());

  m(1, 0) = std::conj(m(0, 1));
  CHECK(DensityMatrix3(m).check().empty());
  m(0, 1) = 0.8;  // |rho12|^2 > rho11 rho22
  m(1, 0) = 0.8;
  const auto v = DensityMatrix3(m).check();
  CHECK(std::find(v.begin(), v.end(), "not positive semidefinite") != v.end());

  CHECK_FALSE(DensityMatrix3::diagonal(0.7, 0.4, 0.0).check().empty());
}

TEST_CASE("initial density is diagonal with the prepared populations") {
  const auto prep = make_medium(0.8, 0.2, 10.0, std::nullopt);
  const auto rho = initial_density(prep);
  CHECK(rho(1, 1).real() == 0.8);
  CHECK(rho(2, 2).real() == 0.2);
  CHECK(rho(3, 3).real() == 0.0);
  CHECK(rho(1, 2) == cplx{});
}

TEST_CASE("sampled input pulses carry the requested Area") {
  const TimeAxis axis{-60.0, 60.0, 6001};
  for (auto shape : {PulseShape::sech, PulseShape::gaussian}) {
    for (double width : {0.5, 1.0, 2.0}) {
      const PulseSpec spec{Channel::pump_a, shape, 1.3 * kPi, width, 1.5, 0.7};
      const auto s = sample_input_pulse(spec, axis);
      CHECK(s.warnings.empty());
      cplx area{};
      for (int i = 0; i < axis.n; ++i)
        area += (i == 0 || i == axis.n - 1 ? 0.5 : 1.0) * axis.dt() * s.envelope[i];
      CHECK(std::abs(area) == doctest::Approx(1.3 * kPi).epsilon(1e-9));
      CHECK(std::arg(area) == doctest::Approx(0.7).epsilon(1e-12));
    }
  }
  const auto clipped = sample_input_pulse({Channel::pump_a, PulseShape::sech, kPi, 1.0, 58.0, 0.0}, axis);
  CHECK(clipped.warnings.size() == 1);
  CHECK_THROWS_AS(sample_input_pulse({Channel::pump_a, PulseShape::sech, kPi, 0.0, 0.0, 0.0}, axis),
                  InvalidParameter);
}

TEST_CASE("grid validation") {
  SimulationGrid g;
  g.t = {0.0, 1.0, 11};
  g.z_min = 0.0;
  g.z_max = 1.0;
  g.n_z = 4;
  CHECK_FALSE(violations(g).empty());  // no Doppler nodes
  g.doppler = {{0.0, 0.5}, {1.0, 0.5}};
  CHECK(violations(g).empty());
  CHECK(g.dz() == doctest::Approx(0.25));
  CHECK(g.z_at(2) == doctest::Approx(0.5));
  g.doppler[1].weight = 0.4;
  CHECK_FALSE(violations(g).empty());
}
