#pragma once

// Desk-scale self-check of every module, run against the grid of a config.

#include "twopulse/analytic.hpp"
#include "twopulse/config.hpp"

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace twopulse {

/// Max normalized residual of the analytic solution substituted into the
/// Maxwell and Bloch equations, with centred differences of step h.
struct OracleResidual {
  double maxwell = 0.0;
  double bloch = 0.0;
};

OracleResidual analytic_residual(const AnalyticSolution& sol, std::span<const double> z_points,
                                 std::span<const double> t_points, double h);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string threshold;
  std::string hint;  // set on failure
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool passed() const;
};

VerifyReport verify(const ExperimentConfig& config);

/// check,status,value,threshold,hint lines plus a summary row.
void write_verify_table(std::ostream& out, const VerifyReport& report);

}  // namespace twopulse
