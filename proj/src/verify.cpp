#include "twopulse/verify.hpp"

#include "twopulse/adiabatic.hpp"
#include "twopulse/bloch.hpp"
#include "twopulse/diagnostics.hpp"
#include "twopulse/experiment.hpp"
#include "twopulse/maxwell.hpp"

#include <algorithm>
#include <cmath>

namespace twopulse {

OracleResidual analytic_residual(const AnalyticSolution& sol, std::span<const double> z_points,
                                 std::span<const double> t_points, double h) {
  const double mu = sol.prep.mu;
  double maxwell_err = 0.0, maxwell_scale = 0.0;
  double bloch_err = 0.0, bloch_scale = 0.0;
  for (double z : z_points) {
    for (double t : t_points) {
      const FieldPair up = analytic_fields(sol, z + h, t);
      const FieldPair down = analytic_fields(sol, z - h, t);
      const AveragedCoherences avg = averaged_density(sol, z, t);
      const cplx i{0.0, 1.0};
      const cplx ra = mu * avg.rho13;
      const cplx rb = mu * avg.rho23;
      maxwell_err = std::max({maxwell_err, std::abs((up.a - down.a) / (2.0 * h) + i * ra),
                              std::abs((up.b - down.b) / (2.0 * h) + i * rb)});
      maxwell_scale = std::max({maxwell_scale, std::abs(ra), std::abs(rb)});

      const FieldPair f = analytic_fields(sol, z, t);
      for (const auto& node : sol.quadrature) {
        const auto later = analytic_density(sol, z, t + h, node.detuning).matrix();
        const auto earlier = analytic_density(sol, z, t - h, node.detuning).matrix();
        const auto rhs = bloch_rhs(analytic_density(sol, z, t, node.detuning), f.a, f.b,
                                   node.detuning).matrix();
        bloch_err = std::max(bloch_err, ((later - earlier) / (2.0 * h) - rhs).norm());
        bloch_scale = std::max(bloch_scale, rhs.norm());
      }
    }
  }
  return {maxwell_scale > 0.0 ? maxwell_err / maxwell_scale : maxwell_err,
          bloch_scale > 0.0 ? bloch_err / bloch_scale : bloch_err};
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

constexpr const char* kDtHint = "reduce dt (or raise substeps): the T grid does not resolve the pulses";
constexpr const char* kDzHint = "reduce dz (or dt): the grid does not resolve the field evolution";

CheckResult make_check(std::string name, bool passed, double value, std::string threshold,
                       std::string hint) {
  return {std::move(name), passed, value, std::move(threshold), passed ? std::string{} : std::move(hint)};
}

double relative_l2(const std::vector<cplx>& coarse_a, const std::vector<cplx>& coarse_b,
                   const std::vector<cplx>& fine_a, const std::vector<cplx>& fine_b, int stride) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < coarse_a.size(); ++i) {
    const std::size_t j = i * stride;
    diff += std::norm(coarse_a[i] - fine_a[j]) + std::norm(coarse_b[i] - fine_b[j]);
    norm += std::norm(fine_a[j]) + std::norm(fine_b[j]);
  }
  return std::sqrt(diff / norm);
}

struct ShortRun {
  FieldState exit;
  double flux_max = 0.0;
};

// A soliton section from kappa Z = -1 to +1 with the analytic fields as input.
ShortRun soliton_section(const MediumPrep& medium, const ExperimentConfig& config, double dt,
                         double dz_kappa, bool adiabatic) {
  MediumPrep prep = medium;
  prep.mask = {};
  SimulationGrid grid;
  const double t_min = -15.0, t_max = 25.0;
  grid.t = TimeAxis{t_min, t_max, static_cast<int>(std::lround((t_max - t_min) / dt)) + 1};
  grid.doppler = make_doppler_quadrature(prep.delta_bar, prep.t2_star,
                                         prep.sharp_line() ? 1 : config.grid.doppler_nodes);
  const AnalyticSolution sol = make_analytic_solution(prep, config.tau, grid.doppler);
  const double kappa = sol.coeffs.kappa;
  grid.z_min = -1.0 / kappa;
  grid.z_max = 1.0 / kappa;
  grid.n_z = static_cast<int>(std::lround(2.0 / dz_kappa));

  PropagationSettings settings;
  settings.substeps = config.grid.substeps;
  settings.stiff_phase_limit = config.grid.stiff_phase_limit;
  settings.tau = config.tau;
  settings.stations = {grid.z_max};
  const FieldState input = sample_analytic_fields(sol, grid.z_min, grid.t);
  const PropagationResult r = adiabatic ? reduced_propagate(input, prep, grid, settings)
                                        : propagate(input, prep, grid, settings);
  ShortRun out;
  out.exit = r.snapshots.back().fields;
  for (const auto& s : r.steps) out.flux_max = std::max(out.flux_max, s.residual_max);
  if (adiabatic) {
    double peak = 0.0, drift = 0.0;
    for (std::size_t i = 0; i < input.omega_a.size(); ++i) {
      const double f0 = std::norm(input.omega_a[i]) + std::norm(input.omega_b[i]);
      const double f1 = std::norm(out.exit.omega_a[i]) + std::norm(out.exit.omega_b[i]);
      peak = std::max(peak, f0);
      drift = std::max(drift, std::abs(f1 - f0));
    }
    out.flux_max = std::max(out.flux_max, drift / peak);
  }
  return out;
}

}  // namespace

VerifyReport verify(const ExperimentConfig& config) {
  VerifyReport report;
  auto& checks = report.checks;
  const SimulationGrid grid = build_grid(config);
  const double dt = grid.t.dt();

  // Bloch kernel: constant resonant drive, rho33 = sin^2(Omega T / 2).
  {
    const TimeAxis axis{0.0, 2.0 * kPi, static_cast<int>(std::lround(2.0 * kPi / dt)) + 1};
    const std::vector<cplx> a(axis.size(), cplx{1.0, 0.0}), b(axis.size());
    const auto rho = integrate_atom({DensityMatrix3::diagonal(1, 0, 0), 0.0, 1.0}, a, b, axis, 1);
    double err = 0.0;
    for (int i = 0; i < axis.n; ++i) {
      const double s = std::sin(0.5 * axis.at(i));
      err = std::max(err, std::abs(rho[i](3, 3).real() - s * s));
    }
    checks.push_back(make_check("rabi_oscillation", err < 1e-8, err, "< 1e-8", kDtHint));
  }

  // 2 pi sech on resonance returns the atom to its ground state.
  {
    const TimeAxis axis{-20.0, 20.0, static_cast<int>(std::lround(40.0 / dt)) + 1};
    const auto pulse = sample_input_pulse({Channel::pump_a, PulseShape::sech, 2.0 * kPi, 1.0, 0.0, 0.0}, axis);
    const std::vector<cplx> b(axis.size());
    const auto rho = integrate_atom({DensityMatrix3::diagonal(1, 0, 0), 0.0, 1.0}, pulse.envelope, b, axis, 1);
    const double err = std::abs(rho.back()(1, 1).real() - 1.0);
    checks.push_back(make_check("sech_2pi_return", err < 1e-6, err, "< 1e-6", kDtHint));
  }

  // Density invariants for the configured pulses on a few atom classes.
  {
    const auto a = sample_input_pulse(config.pulse_a, grid.t).envelope;
    const auto b = sample_input_pulse(config.pulse_b, grid.t).envelope;
    std::vector<DopplerNode> nodes{grid.doppler.front(), grid.doppler[grid.doppler.size() / 2],
                                   grid.doppler.back()};
    std::size_t bad = 0;
    for (const auto& node : nodes) {
      const auto rho = integrate_atom({initial_density(config.prep), node.detuning, node.weight},
                                      a, b, grid.t, config.grid.substeps);
      for (const auto& r : rho) bad += r.check(1e-10, 1e-8).empty() ? 0 : 1;
    }
    checks.push_back(make_check("density_invariants", bad == 0, static_cast<double>(bad),
                                "0 violating samples", kDtHint));
  }

  // Analytic oracle substituted into the Maxwell-Bloch equations.
  {
    const AnalyticSolution sol = make_analytic_solution(config.prep, config.tau, grid.doppler);
    const double kappa = sol.coeffs.kappa;
    std::vector<double> zs, ts;
    for (double kz : {-3.0, -1.0, 0.0, 1.0, 3.0}) zs.push_back(kz / kappa);
    for (int k = -6; k <= 10; ++k) ts.push_back(0.5 * k * config.tau);
    const OracleResidual r = analytic_residual(sol, zs, ts, 1e-3 * std::min(config.tau, 1.0 / kappa));
    const double worst = std::max(r.maxwell, r.bloch);
    checks.push_back(make_check("analytic_oracle_residual", worst < 1e-4, worst, "< 1e-4",
                                "the analytic solution does not satisfy the equations"));
  }

  // Area laws.
  {
    const PropagationCoefficients coeffs{config.kappa, config.delta, config.tau};
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      MediumPrep p = config.prep;
      p.alpha2 = (i + 0.5) / 10.0;
      p.beta2 = 1.0 - p.alpha2;
      for (int k = 0; k < 10; ++k) {
        const AreaReport a = theoretical_areas(p, coeffs, (-20.0 + 4.0 * k) / config.kappa);
        worst = std::max(worst, std::abs(a.theta_total - 2.0 * kPi));
      }
    }
    checks.push_back(make_check("total_area_law", worst < 1e-8, worst, "< 1e-8", "Area curve evaluation lost precision"));

    const AnalyticSolution sol = make_analytic_solution(config.prep, config.tau, grid.doppler);
    const TimeAxis axis{-30.0, 50.0, static_cast<int>(std::lround(80.0 / dt)) + 1};
    double err = 0.0;
    for (double kz : {-5.0, 0.0, 5.0}) {
      const AreaReport m = measured_areas(sample_analytic_fields(sol, kz / config.kappa, axis), axis);
      const AreaReport t = theoretical_areas(config.prep, sol.coeffs, kz / config.kappa);
      err = std::max({err, std::abs(m.theta_a - t.theta_a), std::abs(m.theta_b - t.theta_b)});
    }
    checks.push_back(make_check("analytic_area_measured", err < 1e-6, err, "< 1e-6", kDtHint));
  }

  // Full solver: dt and dz self-convergence, flux balance.
  try {
    const double dz = 0.05;
    const ShortRun r1 = soliton_section(config.prep, config, dt, dz, false);
    const ShortRun r2 = soliton_section(config.prep, config, dt / 2, dz, false);
    const ShortRun r4 = soliton_section(config.prep, config, dt / 4, dz, false);
    const double e1 = relative_l2(r1.exit.omega_a, r1.exit.omega_b, r2.exit.omega_a, r2.exit.omega_b, 2);
    const double e2 = relative_l2(r2.exit.omega_a, r2.exit.omega_b, r4.exit.omega_a, r4.exit.omega_b, 2);
    const double order = std::log2(e1 / e2);
    checks.push_back(make_check("dt_self_convergence_error", e1 < 1e-4, e1, "< 1e-4", kDtHint));
    checks.push_back(make_check("dt_order", std::abs(order - 4.0) <= 0.5, order, "4.0 +- 0.5", kDtHint));
    checks.push_back(make_check("flux_residual_per_step", r1.flux_max < 1e-3, r1.flux_max, "< 1e-3", kDzHint));

    const ShortRun z1 = soliton_section(config.prep, config, dt, 2 * dz, false);
    const ShortRun z4 = soliton_section(config.prep, config, dt, dz / 2, false);
    const double d1 = relative_l2(z1.exit.omega_a, z1.exit.omega_b, r1.exit.omega_a, r1.exit.omega_b, 1);
    const double d2 = relative_l2(r1.exit.omega_a, r1.exit.omega_b, z4.exit.omega_a, z4.exit.omega_b, 1);
    const double z_order = std::log2(d1 / d2);
    checks.push_back(make_check("dz_order", std::abs(z_order - 2.0) <= 0.3, z_order, "2.0 +- 0.3", kDzHint));
  } catch (const Error& e) {
    checks.push_back(make_check("full_solver_section", false, 0.0, "completes", std::string(e.what())));
  }

  // Adiabatic solver: Manley-Rowe flux invariance on a sharp line.
  try {
    MediumPrep sharp = config.prep;
    sharp.t2_star.reset();
    if (sharp.delta_bar == 0.0) sharp.delta_bar = 10.0;
    const ShortRun r = soliton_section(sharp, config, dt, 0.05, true);
    checks.push_back(make_check("manley_rowe_residual", r.flux_max < 1e-6, r.flux_max, "< 1e-6",
                                "adiabatic field update is not unitary"));
  } catch (const Error& e) {
    checks.push_back(make_check("adiabatic_solver_section", false, 0.0, "completes", std::string(e.what())));
  }
  return report;
}

void write_verify_table(std::ostream& out, const VerifyReport& report) {
  out << "check,status,value,threshold,hint\n";
  int failed = 0;
  const auto field = [](std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  };
  for (const auto& c : report.checks) {
    failed += c.passed ? 0 : 1;
    out << c.name << ',' << (c.passed ? "PASS" : "FAIL") << ',' << format_number(c.value) << ','
        << field(c.threshold) << ',' << field(c.hint) << '\n';
  }
  out << "summary," << (failed ? "FAIL" : "PASS") << ',' << failed << ",0 failures,\n";
}

}  // namespace twopulse
