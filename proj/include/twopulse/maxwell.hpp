#pragma once

// Full Maxwell-Bloch propagation: dOmega_a/dZ = -i mu <rho13>,
// dOmega_b/dZ = -i mu <rho23>, with the atoms re-integrated from their
// prepared state at every Z.

#include "twopulse/domain.hpp"
#include "twopulse/propagation.hpp"

#include <vector>

namespace twopulse {

/// Doppler-averaged coherences and excited-state population over T.
struct Polarization {
  std::vector<cplx> a;
  std::vector<cplx> b;
  std::vector<double> rho33;
};

Polarization polarization(const FieldState& fields, const MediumPrep& prep,
                          const SimulationGrid& grid, const PropagationSettings& settings = {});

/// RK4 substeps used for an atom class with this detuning.
int class_substeps(double detuning, double dt, const PropagationSettings& settings);

/// Marches `input` (taken to sit at grid.z_min) to grid.z_max.
PropagationResult propagate(const FieldState& input, const MediumPrep& prep,
                            const SimulationGrid& grid, const PropagationSettings& settings = {});

}  // namespace twopulse
