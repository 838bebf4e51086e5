#include "twopulse/experiment.hpp"

#include "twopulse/adiabatic.hpp"
#include "twopulse/analytic.hpp"
#include "twopulse/diagnostics.hpp"
#include "twopulse/march.hpp"
#include "twopulse/maxwell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace twopulse {

namespace {

constexpr double kFluxGate = 1e-3;
constexpr double kManleyRoweGate = 1e-6;
constexpr double kAreaBand = 0.10;

std::string yes_no(bool v) { return v ? "yes" : "no"; }

const char* solver_name(Solver s) {
  switch (s) {
    case Solver::full: return "full";
    case Solver::adiabatic: return "adiabatic";
    case Solver::analytic: return "analytic";
  }
  return "?";
}

ExperimentRun analytic_run(const ExperimentConfig& config, const SimulationGrid& grid,
                           const PropagationSettings& settings) {
  ExperimentRun run;
  run.grid = grid;
  const AnalyticSolution sol = make_analytic_solution(config.prep, config.tau, grid.doppler);
  const TimeAxis& axis = grid.t;
  const auto wanted = detail::station_flags(grid, settings);
  for (int k = 0; k <= grid.n_z; ++k) {
    FieldState fields = sample_analytic_fields(sol, grid.z_at(k), axis);
    const AreaReport areas = measured_areas(fields, axis);
    run.result.steps.push_back({fields.z, areas.theta_a, areas.theta_b, 0.0, 0.0});
    if (wanted[k]) {
      std::vector<double> rho33(axis.size());
      for (int i = 0; i < axis.n; ++i) rho33[i] = averaged_density(sol, fields.z, axis.at(i)).rho33;
      run.result.snapshots.push_back({fields, std::move(rho33)});
    }
    if (k == 0) run.input = std::move(fields);
  }
  if (std::isfinite(config.prep.mask.entry) || std::isfinite(config.prep.mask.exit))
    run.warnings.push_back("analytic solver ignores the medium faces (soliton fills all Z)");
  return run;
}

void add_fits(Report& r, const std::string& prefix, const std::vector<cplx>& env,
              const TimeAxis& axis, double reference_peak) {
  double peak = 0.0;
  for (const auto& v : env) peak = std::max(peak, std::abs(v));
  if (!(peak > 1e-6 * reference_peak)) {
    r.emplace_back(prefix + "_fit", "negligible field");
    return;
  }
  try {
    const SechFit s = fit_sech(env, axis);
    r.emplace_back(prefix + "_sech_amplitude", format_number(s.amplitude));
    r.emplace_back(prefix + "_sech_width", format_number(s.width));
    r.emplace_back(prefix + "_sech_center", format_number(s.center));
    r.emplace_back(prefix + "_sech_rms_misfit", format_number(s.rms_misfit));
    r.emplace_back(prefix + "_sech_tail_slope", format_number(s.tail_slope));
    const GaussianFit g = fit_gaussian(env, axis);
    r.emplace_back(prefix + "_gaussian_width", format_number(g.width));
    r.emplace_back(prefix + "_gaussian_rms_misfit", format_number(g.rms_misfit));
  } catch (const NotSinglePulse&) {
    r.emplace_back(prefix + "_fit", "multiple peaks");
  } catch (const Error& e) {
    r.emplace_back(prefix + "_fit", std::string("failed: ") + e.what());
  }
}

// max over T of | |Oa|^2 + |Ob|^2 at the station - at the entry | relative
// to the entry peak flux.
double manley_rowe_total(const ExperimentRun& run) {
  const auto flux = [](const FieldState& f, std::size_t i) {
    return std::norm(f.omega_a[i]) + std::norm(f.omega_b[i]);
  };
  double peak = 0.0;
  for (std::size_t i = 0; i < run.input.omega_a.size(); ++i) peak = std::max(peak, flux(run.input, i));
  if (!(peak > 0.0)) return 0.0;
  double worst = 0.0;
  for (const auto& snap : run.result.snapshots)
    for (std::size_t i = 0; i < run.input.omega_a.size(); ++i)
      worst = std::max(worst, std::abs(flux(snap.fields, i) - flux(run.input, i)));
  return worst / peak;
}

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string report_value(const Report& report, const std::string& key) {
  for (const auto& [k, v] : report)
    if (k == key) return v;
  return {};
}

ExperimentRun simulate(const ExperimentConfig& config) {
  const SimulationGrid grid = build_grid(config);
  const PropagationSettings settings = build_settings(config);
  if (config.solver == Solver::analytic) return analytic_run(config, grid, settings);

  ExperimentRun run;
  run.grid = grid;
  if (config.input == InputMode::analytic) {
    const AnalyticSolution sol = make_analytic_solution(config.prep, config.tau, grid.doppler);
    run.input = sample_analytic_fields(sol, grid.z_min, grid.t);
  } else {
    auto a = sample_input_pulse(config.pulse_a, grid.t);
    auto b = sample_input_pulse(config.pulse_b, grid.t);
    for (auto* s : {&a, &b})
      run.warnings.insert(run.warnings.end(), s->warnings.begin(), s->warnings.end());
    run.input.omega_a = std::move(a.envelope);
    run.input.omega_b = std::move(b.envelope);
    run.input.z = grid.z_min;
  }
  run.result = config.solver == Solver::adiabatic
                   ? reduced_propagate(run.input, config.prep, grid, settings)
                   : propagate(run.input, config.prep, grid, settings);
  return run;
}

Report build_report(const ExperimentConfig& config, const ExperimentRun& run) {
  Report r;
  const TimeAxis& axis = run.grid.t;
  const MediumPrep& prep = config.prep;
  const double kappa = config.kappa;
  const PropagationCoefficients coeffs{config.kappa, config.delta, config.tau};

  r.emplace_back("solver", solver_name(config.solver));
  r.emplace_back("scheme", config.grid.scheme == ZScheme::trapezoid ? "trapezoid" : "midpoint");
  r.emplace_back("input", config.solver == Solver::analytic || config.input == InputMode::analytic
                              ? "analytic soliton"
                              : "pulses");
  r.emplace_back("alpha2", format_number(prep.alpha2));
  r.emplace_back("beta2", format_number(prep.beta2));
  r.emplace_back("delta_bar", format_number(prep.delta_bar));
  r.emplace_back("t2_star", prep.sharp_line() ? "sharp" : format_number(*prep.t2_star));
  r.emplace_back("mu", format_number(prep.mu));
  r.emplace_back("tau", format_number(config.tau));
  r.emplace_back("kappa", format_number(kappa));
  r.emplace_back("delta_over_kappa", format_number(config.delta / kappa));
  r.emplace_back("n_t", std::to_string(axis.n));
  r.emplace_back("dt", format_number(axis.dt()));
  r.emplace_back("n_z", std::to_string(run.grid.n_z));
  r.emplace_back("dz_kappa", format_number(run.grid.dz() * kappa));
  r.emplace_back("doppler_nodes", std::to_string(run.grid.doppler.size()));
  for (const auto& w : run.warnings) r.emplace_back("warning", w);

  // Conservation.
  double step_max = 0.0;
  for (const auto& s : run.result.steps) step_max = std::max(step_max, s.residual_max);
  if (config.solver == Solver::full) {
    r.emplace_back("poynting_residual_max_per_step", format_number(step_max));
    r.emplace_back("poynting_residual_gate", format_number(kFluxGate));
    r.emplace_back("poynting_residual_ok", yes_no(step_max < kFluxGate));
  } else if (config.solver == Solver::adiabatic) {
    const double total = manley_rowe_total(run);
    r.emplace_back("manley_rowe_residual_max_per_step", format_number(step_max));
    r.emplace_back("manley_rowe_residual", format_number(total));
    r.emplace_back("manley_rowe_gate", format_number(kManleyRoweGate));
    r.emplace_back("manley_rowe_ok", yes_no(std::max(total, step_max) < kManleyRoweGate));
  }

  // Areas.
  const FieldState& out = run.result.snapshots.empty() ? run.input : run.result.snapshots.back().fields;
  const AreaReport in_area = measured_areas(run.input, axis);
  const AreaReport out_area = measured_areas(out, axis);
  r.emplace_back("output_z_kappa", format_number(out.z * kappa));
  r.emplace_back("input_theta_a_pi", format_number(in_area.theta_a / kPi));
  r.emplace_back("input_theta_b_pi", format_number(in_area.theta_b / kPi));
  r.emplace_back("output_theta_a_pi", format_number(out_area.theta_a / kPi));
  r.emplace_back("output_theta_b_pi", format_number(out_area.theta_b / kPi));
  r.emplace_back("output_theta_total_pi", format_number(out_area.theta_total / kPi));
  r.emplace_back("output_abs_area_a_pi", format_number(pulse_area_abs(out.omega_a, axis) / kPi));
  r.emplace_back("output_abs_area_b_pi", format_number(pulse_area_abs(out.omega_b, axis) / kPi));
  r.emplace_back("stokes_area_within_band",
                 yes_no(std::abs(out_area.theta_b - 2.0 * kPi) <= kAreaBand * 2.0 * kPi));
  r.emplace_back("stokes_area_band_note",
                 "the 10% band around 2 pi is an implementation choice, not a published value");

  // Transfer zone.
  if (config.solver != Solver::analytic && config.input == InputMode::pulses &&
      in_area.theta_b < in_area.theta_a) {
    const double entry = std::max(run.grid.z_min, prep.mask.entry);
    try {
      const double predicted = transfer_length(prep, coeffs, in_area.theta_b);
      r.emplace_back("transfer_length_predicted_kappa", format_number(predicted * kappa));
      if (const auto parity = area_parity_location(run.result.steps)) {
        const double measured = (*parity - entry) * kappa;
        r.emplace_back("area_parity_measured_kappa", format_number(measured));
        r.emplace_back("transfer_excess", format_number(measured / (predicted * kappa) - 1.0));
      } else {
        r.emplace_back("area_parity_measured_kappa", "none");
      }
    } catch (const Error& e) {
      r.emplace_back("transfer_length_predicted_kappa", std::string("n/a: ") + e.what());
    }
  }

  // Depletion, peaks, fits.
  double in_peak = 0.0;
  for (std::size_t i = 0; i < run.input.omega_a.size(); ++i)
    in_peak = std::max({in_peak, std::abs(run.input.omega_a[i]), std::abs(run.input.omega_b[i])});
  try {
    r.emplace_back("pump_depletion", format_number(pump_depletion(run.input, out, axis)));
  } catch (const Error&) {
    r.emplace_back("pump_depletion", "n/a");
  }
  r.emplace_back("peak_count_a", std::to_string(peak_count(out.omega_a)));
  r.emplace_back("peak_count_b", std::to_string(peak_count(out.omega_b)));
  const auto total = total_envelope(out);
  r.emplace_back("peak_count_total", std::to_string(peak_count(std::span<const double>(total))));
  add_fits(r, "output_a", out.omega_a, axis, in_peak);
  add_fits(r, "output_b", out.omega_b, axis, in_peak);

  if (run.result.snapshots.size() >= 2) {
    std::vector<FieldState> states;
    for (const auto& s : run.result.snapshots) states.push_back(s.fields);
    r.emplace_back("pump_peak_drift_per_kappa_z",
                   format_number(group_velocity(states, Channel::pump_a, axis) / kappa));
    r.emplace_back("stokes_peak_drift_per_kappa_z",
                   format_number(group_velocity(states, Channel::stokes_b, axis) / kappa));
  }

  if (config.solver == Solver::adiabatic)
    r.emplace_back("next_order_estimate",
                   format_number(next_order_estimate(in_area.theta_a, prep.alpha2, config.tau,
                                                     prep.delta_bar)));
  return r;
}

void write_snapshots_csv(std::ostream& out, const ExperimentRun& run, double kappa) {
  out << "z_kappa,t_over_tau,re_omega_a,im_omega_a,re_omega_b,im_omega_b,rho33_avg\n";
  const TimeAxis& axis = run.grid.t;
  for (const auto& snap : run.result.snapshots) {
    const std::string z = format_number(snap.fields.z * kappa);
    for (int i = 0; i < axis.n; ++i) {
      out << z << ',' << format_number(axis.at(i)) << ','
          << format_number(snap.fields.omega_a[i].real()) << ','
          << format_number(snap.fields.omega_a[i].imag()) << ','
          << format_number(snap.fields.omega_b[i].real()) << ','
          << format_number(snap.fields.omega_b[i].imag()) << ','
          << format_number(snap.rho33_avg[i]) << '\n';
    }
  }
}

void write_areas_csv(std::ostream& out, const ExperimentConfig& config, const ExperimentRun& run) {
  out << "z_kappa,theta_a,theta_b,theta_total,theory_theta_a,theory_theta_b\n";
  const PropagationCoefficients coeffs{config.kappa, config.delta, config.tau};
  for (const auto& s : run.result.steps) {
    const AreaReport theory = theoretical_areas(config.prep, coeffs, s.z);
    out << format_number(s.z * config.kappa) << ',' << format_number(s.theta_a) << ','
        << format_number(s.theta_b) << ',' << format_number(std::hypot(s.theta_a, s.theta_b))
        << ',' << format_number(theory.theta_a) << ',' << format_number(theory.theta_b) << '\n';
  }
}

void write_theory_areas_csv(std::ostream& out, const ExperimentConfig& config) {
  out << "z_kappa,theta_a,theta_b,theta_total\n";
  const PropagationCoefficients coeffs{config.kappa, config.delta, config.tau};
  const GridConfig& g = config.grid;
  for (int k = 0; k <= g.n_z; ++k) {
    const double zk = g.z_min + (g.z_max - g.z_min) * k / g.n_z;
    const AreaReport a = theoretical_areas(config.prep, coeffs, zk / config.kappa);
    out << format_number(zk) << ',' << format_number(a.theta_a) << ',' << format_number(a.theta_b)
        << ',' << format_number(a.theta_total) << '\n';
  }
}

void write_report(std::ostream& out, const Report& report) {
  for (const auto& [k, v] : report) out << k << " = " << v << '\n';
}

void write_station_svg(std::ostream& out, const Snapshot& snapshot, const TimeAxis& axis,
                       double kappa) {
  constexpr double kW = 640, kH = 360, kLeft = 60, kRight = 20, kTop = 30, kBottom = 40;
  double peak = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i)
    peak = std::max({peak, std::abs(snapshot.fields.omega_a[i]), std::abs(snapshot.fields.omega_b[i])});
  if (!(peak > 0.0)) peak = 1.0;
  const auto x = [&](double t) {
    return kLeft + (t - axis.t_min) / (axis.t_max - axis.t_min) * (kW - kLeft - kRight);
  };
  const auto y = [&](double v) { return kH - kBottom - v / peak * (kH - kTop - kBottom); };
  const auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  const auto line = [&](const std::vector<cplx>& env, const char* colour) {
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (int i = 0; i < axis.n; ++i)
      out << (i ? " " : "") << fmt(x(axis.at(i))) << ',' << fmt(y(std::abs(env[i])));
    out << "\"/>\n";
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight
      << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kH - kBottom << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"" << kH - kBottom + 16 << "\">" << fmt(axis.t_min)
      << "</text>\n";
  out << "<text x=\"" << kW - kRight << "\" y=\"" << kH - kBottom + 16
      << "\" text-anchor=\"end\">" << fmt(axis.t_max) << "</text>\n";
  out << "<text x=\"" << (kW + kLeft - kRight) / 2 << "\" y=\"" << kH - 6
      << "\" text-anchor=\"middle\">T / tau</text>\n";
  out << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4 << "\" text-anchor=\"end\">"
      << fmt(peak) << "</text>\n";
  out << "<text x=\"" << kLeft - 6 << "\" y=\"" << kH - kBottom << "\" text-anchor=\"end\">0</text>\n";
  line(snapshot.fields.omega_a, "#1f4e9c");
  line(snapshot.fields.omega_b, "#c0392b");
  out << "<text x=\"" << kW - kRight << "\" y=\"" << kTop - 10 << "\" text-anchor=\"end\">"
      << "kappa Z = " << fmt(snapshot.fields.z * kappa)
      << "  (blue |Omega_a|, red |Omega_b|)</text>\n";
  out << "</svg>\n";
}

ExperimentArtifacts run_experiment(const ExperimentConfig& config) {
  ExperimentArtifacts art;
  art.directory = config.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(art.directory, ec);
  if (ec || !std::filesystem::is_directory(art.directory))
    throw ConfigError({"output directory " + art.directory.string() + " is not writable"});

  art.run = simulate(config);
  art.report = build_report(config, art.run);

  const auto open = [&](const std::string& name) {
    std::ofstream f(art.directory / name, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError({"cannot write " + (art.directory / name).string()});
    return f;
  };
  {
    auto f = open("snapshots.csv");
    write_snapshots_csv(f, art.run, config.kappa);
  }
  {
    auto f = open("areas.csv");
    write_areas_csv(f, config, art.run);
  }
  {
    auto f = open("report.txt");
    write_report(f, art.report);
  }
  for (std::size_t k = 0; k < art.run.result.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "plot_%02zu.svg", k);
    auto f = open(name);
    write_station_svg(f, art.run.result.snapshots[k], art.run.grid.t, config.kappa);
  }
  return art;
}

}  // namespace twopulse
