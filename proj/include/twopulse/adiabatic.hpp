#pragma once

// Leading-order adiabatic elimination of the excited level: an effective
// two-level ground-state system driven by the two-photon Rabi frequency
// Omega_a conj(Omega_b) / (2 delta_bar) and Stark shift
// (|Omega_a|^2 - |Omega_b|^2) / (4 delta_bar).

#include "twopulse/domain.hpp"
#include "twopulse/propagation.hpp"

#include <string>
#include <vector>

namespace twopulse {

struct GroundDensityMatrix2 {
  double r11 = 1.0;
  double r22 = 0.0;
  cplx r12{};

  std::vector<std::string> check(double tol = 1e-12) const;
};

/// y + h k, used when the derivative is stored in the same shape.
GroundDensityMatrix2 axpy(const GroundDensityMatrix2& y, double h, const GroundDensityMatrix2& k);

struct GroundDerivative {
  double d11 = 0.0;
  double d22 = 0.0;
  cplx d12{};
};

cplx two_photon_rabi(cplx omega_a, cplx omega_b, double delta_bar);
double two_photon_stark(cplx omega_a, cplx omega_b, double delta_bar);

/// Throws InvalidParameter when delta_bar == 0.
GroundDerivative reduced_bloch_rhs(const GroundDensityMatrix2& rho, cplx omega_a, cplx omega_b,
                                   double delta_bar);

/// Ground-state density over T for fixed fields, RK4 from diag(alpha2, beta2).
struct GroundTrajectory {
  std::vector<double> r11;
  std::vector<double> r22;
  std::vector<cplx> r12;
  std::vector<double> rho33;  // always zero, kept for the flux diagnostics
};

GroundTrajectory reduced_response(const FieldState& fields, const MediumPrep& prep,
                                  const TimeAxis& axis, int substeps);

/// Reduced Maxwell march. Requires a sharp line.
PropagationResult reduced_propagate(const FieldState& input, const MediumPrep& prep,
                                    const SimulationGrid& grid,
                                    const PropagationSettings& settings = {});

/// Size of the first neglected term of the adiabatic series,
/// |theta_a alpha2 / 2| / (tau delta_bar)^2. Reported only.
double next_order_estimate(double theta_a, double alpha2, double tau, double delta_bar);

}  // namespace twopulse
