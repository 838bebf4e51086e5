// Command-line front end: simulate, analytic, adiabatic, verify, areas.
//
// Exit codes: 0 success, 1 config error, 2 numerical failure,
// 3 verification failure.

#include "twopulse/config.hpp"
#include "twopulse/experiment.hpp"
#include "twopulse/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

enum Exit { kOk = 0, kConfigError = 1, kNumericalFailure = 2, kVerifyFailure = 3 };

struct Options {
  std::string config;
  std::string out;
  std::optional<int> stations;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Options& opt, bool config_required) {
  auto* c = cmd->add_option("--config", opt.config, "experiment config file (INI)");
  if (config_required) c->required();
  cmd->add_option("--out", opt.out, "output directory (overrides [run] output_dir)");
  cmd->add_option("--stations", opt.stations, "number of evenly spaced snapshot stations")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", opt.quiet, "suppress the summary on stdout");
}

twopulse::ExperimentConfig load(const Options& opt) {
  twopulse::ExperimentConfig cfg;
  if (!opt.config.empty()) {
    cfg = twopulse::load_config(opt.config);
  } else {
    auto parsed = twopulse::parse_config("");
    cfg = std::move(*parsed.config);
  }
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  if (opt.stations) {
    cfg.stations = *opt.stations;
    cfg.station_positions.clear();
  }
  return cfg;
}

int run_simulation(const Options& opt, std::optional<twopulse::Solver> forced) {
  auto cfg = load(opt);
  if (forced) {
    cfg.solver = *forced;
    if (cfg.solver == twopulse::Solver::adiabatic && !cfg.prep.sharp_line())
      throw twopulse::ConfigError({"[medium] the adiabatic solver requires t2_star = sharp"});
  }
  const auto art = twopulse::run_experiment(cfg);
  if (!opt.quiet) {
    std::cout << "wrote " << art.directory.string() << " (" << art.run.result.snapshots.size()
              << " stations)\n";
    for (const char* key :
         {"output_theta_a_pi", "output_theta_b_pi", "pump_depletion", "poynting_residual_max_per_step",
          "manley_rowe_residual", "transfer_length_predicted_kappa", "area_parity_measured_kappa"}) {
      const auto v = twopulse::report_value(art.report, key);
      if (!v.empty()) std::cout << key << " = " << v << '\n';
    }
    for (const auto& w : art.run.warnings) std::cout << "warning: " << w << '\n';
  }
  return kOk;
}

int run_verify(const Options& opt) {
  const auto cfg = load(opt);
  const auto report = twopulse::verify(cfg);
  if (!opt.quiet) twopulse::write_verify_table(std::cout, report);
  if (!opt.out.empty()) {
    std::filesystem::create_directories(opt.out);
    std::ofstream f(std::filesystem::path(opt.out) / "verify.csv", std::ios::binary);
    twopulse::write_verify_table(f, report);
  }
  return report.passed() ? kOk : kVerifyFailure;
}

int run_areas(const Options& opt) {
  const auto cfg = load(opt);
  if (!opt.quiet) twopulse::write_theory_areas_csv(std::cout, cfg);
  if (!opt.out.empty()) {
    std::filesystem::create_directories(opt.out);
    std::ofstream f(std::filesystem::path(opt.out) / "areas_theory.csv", std::ios::binary);
    twopulse::write_theory_areas_csv(f, cfg);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent pump/Stokes pulse propagation in lambda media"};
  app.require_subcommand(1);
  Options opt;

  auto* simulate = app.add_subcommand("simulate", "run the solver selected in the config");
  add_common(simulate, opt, true);
  auto* analytic = app.add_subcommand("analytic", "sample the analytic two-pulse soliton");
  add_common(analytic, opt, true);
  auto* adiabatic = app.add_subcommand("adiabatic", "run the reduced adiabatic solver");
  add_common(adiabatic, opt, true);
  auto* verify = app.add_subcommand("verify", "desk-scale self-check on the config grid");
  add_common(verify, opt, false);
  auto* areas = app.add_subcommand("areas", "print theoretical Area curves");
  add_common(areas, opt, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (simulate->parsed()) return run_simulation(opt, std::nullopt);
    if (analytic->parsed()) return run_simulation(opt, twopulse::Solver::analytic);
    if (adiabatic->parsed()) return run_simulation(opt, twopulse::Solver::adiabatic);
    if (verify->parsed()) return run_verify(opt);
    if (areas->parsed()) return run_areas(opt);
  } catch (const twopulse::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
    return kConfigError;
  } catch (const twopulse::InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kOk;
}
