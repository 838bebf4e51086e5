#pragma once

// Observables for propagation runs: Areas, transfer length, flux balance,
// pulse-shape fits, peak counting and group delay.

#include "twopulse/analytic.hpp"
#include "twopulse/domain.hpp"
#include "twopulse/propagation.hpp"

#include <optional>
#include <span>
#include <vector>

namespace twopulse {

/// |integral of Omega dT| by the trapezoid rule.
double pulse_area(std::span<const cplx> envelope, const TimeAxis& axis);

/// integral of |Omega| dT by the trapezoid rule.
double pulse_area_abs(std::span<const cplx> envelope, const TimeAxis& axis);

struct AreaReport {
  double theta_a = 0.0;
  double theta_b = 0.0;
  double theta_total = 0.0;
  double z_position = 0.0;
};

AreaReport measured_areas(const FieldState& fields, const TimeAxis& axis);

/// theta_a = 2 pi / h(Z), theta_b = 2 pi / h(-Z),
/// h(Z) = sqrt(1 + exp(2 (alpha2 - beta2) kappa Z)).
AreaReport theoretical_areas(const MediumPrep& prep, const PropagationCoefficients& coeffs,
                             double z);

/// Distance (native units) at which the Stokes Area grows from theta_b_in to
/// parity with the pump.
double transfer_length(const MediumPrep& prep, const PropagationCoefficients& coeffs,
                       double theta_b_in);

/// Flux balance d/dZ (|Oa|^2 + |Ob|^2) + 2 mu d<rho33>/dT over one step.
/// per_step_* are the residual times dZ divided by the peak flux; relative is
/// the residual over the larger of the two balanced terms.
struct FluxResidual {
  double per_step_max = 0.0;
  double per_step_l2 = 0.0;
  double relative = 0.0;
};

FluxResidual flux_residual_step(const FieldState& before, const FieldState& after,
                                std::span<const double> rho33_before,
                                std::span<const double> rho33_after, double mu,
                                const TimeAxis& axis);

/// Residual for every consecutive pair of snapshots.
std::vector<FluxResidual> poynting_residual(std::span<const Snapshot> snapshots, double mu,
                                            const TimeAxis& axis);

struct SechFit {
  double amplitude = 0.0;
  double width = 0.0;
  double center = 0.0;
  double tail_slope = 0.0;  // mean |d log|Omega| / dT| over the tails
  double rms_misfit = 0.0;  // relative to the fitted amplitude
};

/// Least-squares fit of A sech((T - T0) / w) to |Omega|. Throws
/// NotSinglePulse if the envelope has more than one peak.
SechFit fit_sech(std::span<const cplx> envelope, const TimeAxis& axis);

struct GaussianFit {
  double amplitude = 0.0;
  double width = 0.0;
  double center = 0.0;
  double rms_misfit = 0.0;
};

GaussianFit fit_gaussian(std::span<const cplx> envelope, const TimeAxis& axis);

/// Local maxima of |Omega| above threshold_fraction times the global peak;
/// a flat-topped plateau counts once.
int peak_count(std::span<const cplx> envelope, double threshold_fraction = 0.1);
int peak_count(std::span<const double> magnitude, double threshold_fraction = 0.1);

/// Peak T position of |Omega| with parabolic refinement.
double peak_position(std::span<const cplx> envelope, const TimeAxis& axis);

/// Slope dT_peak / dZ from a linear fit over the snapshot positions.
double group_velocity(std::span<const FieldState> snapshots, Channel channel,
                      const TimeAxis& axis);

// --- run summaries ---------------------------------------------------------

/// 1 - E_out / E_in for the pump, with E = integral |Omega_a|^2 dT.
double pump_depletion(const FieldState& input, const FieldState& output, const TimeAxis& axis);

/// First Z where theta_b reaches theta_a, linearly interpolated; empty if
/// the Areas never cross.
std::optional<double> area_parity_location(std::span<const StepRecord> steps);

/// L2 distance between the output magnitudes of two runs, both channels,
/// divided by the L2 norm of the common input.
double envelope_discrepancy(const FieldState& first, const FieldState& second,
                            const FieldState& input);

/// sqrt(|Omega_a|^2 + |Omega_b|^2) per sample.
std::vector<double> total_envelope(const FieldState& fields);

}  // namespace twopulse
