#pragma once

#include "twopulse/domain.hpp"

#include <vector>

namespace twopulse {

/// trapezoid: implicit trapezoid rule in Z. The atoms of the new slab are
/// integrated in T with the slab field closed algebraically on their own
/// polarization, so the step is A-stable (default).
/// midpoint: explicit midpoint in Z with two full T sweeps per step. It
/// amplifies near-resonant components of a sharp line without bound and is
/// kept only as a reference.
enum class ZScheme { trapezoid, midpoint };

struct PropagationSettings {
  ZScheme scheme = ZScheme::trapezoid;
  /// Z positions (native units) at which snapshots are kept; snapped to the
  /// nearest step. Empty selects six evenly spaced stations.
  std::vector<double> stations;
  /// Minimum RK4 substeps per T interval.
  int substeps = 1;
  /// Extra substeps for far-detuned classes so that |Delta| dT per substep
  /// stays below this phase (radians). Zero disables the adjustment.
  double stiff_phase_limit = 1.0;
  /// The trapezoid Z step is taken in a frame rotating with the weak-field
  /// dispersive phase of each channel (alpha2 delta, beta2 delta), with
  /// delta evaluated for pulses of width `tau`. This integrates the linear
  /// dispersion exactly and leaves the scheme second order.
  bool dispersive_frame = true;
  double tau = 1.0;
};

struct Snapshot {
  FieldState fields;
  std::vector<double> rho33_avg;
};

/// Per Z grid point: measured Areas and the flux residual of the step that
/// ended there (zero at the first point).
struct StepRecord {
  double z = 0.0;
  double theta_a = 0.0;
  double theta_b = 0.0;
  double residual_max = 0.0;
  double residual_l2 = 0.0;
};

struct PropagationResult {
  std::vector<Snapshot> snapshots;
  std::vector<StepRecord> steps;
};

/// Six evenly spaced stations over [z_min, z_max] when `n` is 6.
std::vector<double> even_stations(double z_min, double z_max, int n);

}  // namespace twopulse
