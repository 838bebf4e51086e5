#pragma once

// Experiment configuration: flat INI sections [medium], [pulse_a], [pulse_b],
// [grid] and [run]. Positions along Z are given in kappa*Z; the native
// values are derived once kappa is known. See docs/config.md.

#include "twopulse/domain.hpp"
#include "twopulse/errors.hpp"
#include "twopulse/propagation.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twopulse {

enum class Solver { full, adiabatic, analytic };
enum class InputMode { pulses, analytic };

struct GridConfig {
  double t_min = -10.0;
  double t_max = 30.0;
  int n_t = 2001;
  double z_min = 0.0;  // kappa Z
  double z_max = 10.0;
  int n_z = 200;
  int doppler_nodes = 32;  // a sharp line always uses one node
  int substeps = 1;
  double stiff_phase_limit = 1.0;
  ZScheme scheme = ZScheme::trapezoid;
};

struct ExperimentConfig {
  /// mu is resolved (kappa = 1 when not given) and the mask is in native Z.
  MediumPrep prep;
  bool mu_given = false;
  double kappa = 1.0;  // per native Z, at run.tau
  double delta = 0.0;

  PulseSpec pulse_a{Channel::pump_a, PulseShape::sech, 2.0 * kPi, 1.0, 0.0, 0.0};
  PulseSpec pulse_b{Channel::stokes_b, PulseShape::sech, 0.0, 1.0, 0.0, 0.0};
  GridConfig grid;

  Solver solver = Solver::full;
  InputMode input = InputMode::pulses;
  int stations = 6;
  std::vector<double> station_positions;  // kappa Z; overrides `stations`
  std::filesystem::path output_dir = "out";
  double tau = 1.0;  // soliton width used for kappa, delta and analytic input
};

/// Raised with every violation of a rejected config.
class ConfigError : public InvalidParameter {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct ParseOutcome {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> violations;
};

ParseOutcome parse_config(std::string_view text);

/// Reads and parses `path`; throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Native-unit grid with the Doppler quadrature of the medium.
SimulationGrid build_grid(const ExperimentConfig& config);

/// Propagation settings with stations converted to native Z.
PropagationSettings build_settings(const ExperimentConfig& config);

}  // namespace twopulse
