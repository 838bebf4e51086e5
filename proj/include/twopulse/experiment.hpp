#pragma once

// Runs a configured experiment and persists its artifacts: snapshots.csv,
// areas.csv, report.txt and one plot_NN.svg per station.

#include "twopulse/config.hpp"
#include "twopulse/propagation.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace twopulse {

struct ExperimentRun {
  SimulationGrid grid;
  FieldState input;
  PropagationResult result;
  std::vector<std::string> warnings;
};

/// Samples the entry fields and runs the selected solver. Solver errors
/// propagate with the offending Z in their message.
ExperimentRun simulate(const ExperimentConfig& config);

/// Ordered key = value lines of report.txt.
using Report = std::vector<std::pair<std::string, std::string>>;

Report build_report(const ExperimentConfig& config, const ExperimentRun& run);

/// %.17g, so CSV values parse back to the identical double.
std::string format_number(double value);

void write_snapshots_csv(std::ostream& out, const ExperimentRun& run, double kappa);
void write_areas_csv(std::ostream& out, const ExperimentConfig& config, const ExperimentRun& run);
void write_report(std::ostream& out, const Report& report);
void write_station_svg(std::ostream& out, const Snapshot& snapshot, const TimeAxis& axis,
                       double kappa);

/// Theoretical Area curves over the configured Z range (n_z + 1 rows).
void write_theory_areas_csv(std::ostream& out, const ExperimentConfig& config);

struct ExperimentArtifacts {
  std::filesystem::path directory;
  ExperimentRun run;
  Report report;
};

/// simulate + build_report + every file in config.output_dir.
ExperimentArtifacts run_experiment(const ExperimentConfig& config);

/// Looks up a report entry; empty string if absent.
std::string report_value(const Report& report, const std::string& key);

}  // namespace twopulse
