#pragma once

// Three-level von Neumann equations for one atom class, integrated in
// retarded time T at fixed Z with classical fixed-step RK4.

#include "twopulse/domain.hpp"
#include "twopulse/errors.hpp"
#include "twopulse/stage_interp.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace twopulse {

struct AtomClassState {
  DensityMatrix3 rho;
  double detuning = 0.0;
  double weight = 1.0;
};

/// d(rho)/dT = -i [H, rho] with H = Delta |3><3| - (Omega_a/2 |1><3| +
/// Omega_b/2 |2><3| + h.c.).
DensityMatrix3 bloch_rhs(const DensityMatrix3& rho, cplx omega_a, cplx omega_b,
                         double detuning);

/// rho(T) at every sample of `axis`, starting from `initial.rho` at t_min.
std::vector<DensityMatrix3> integrate_atom(const AtomClassState& initial,
                                           std::span<const cplx> omega_a,
                                           std::span<const cplx> omega_b,
                                           const TimeAxis& axis, int substeps);

/// Atoms are prepared at t_min, which must lie at least 6 tau before the
/// earliest pulse centre.
void check_leading_margin(const TimeAxis& axis, double earliest_centre, double tau);

// --- kernel shared with the propagator -------------------------------------

/// The six independent density-matrix elements.
struct BlochState {
  double p11 = 0.0, p22 = 0.0, p33 = 0.0;
  cplx p12{}, p13{}, p23{};
};

BlochState to_state(const DensityMatrix3& rho);
DensityMatrix3 to_matrix(const BlochState& s);

inline BlochState bloch_derivative(const BlochState& s, cplx omega_a, cplx omega_b,
                                   double detuning) {
  const cplx a = 0.5 * omega_a;
  const cplx b = 0.5 * omega_b;
  const cplx i{0.0, 1.0};
  BlochState d;
  d.p11 = -2.0 * std::imag(a * std::conj(s.p13));
  d.p22 = -2.0 * std::imag(b * std::conj(s.p23));
  d.p33 = -(d.p11 + d.p22);
  d.p12 = i * (a * std::conj(s.p23) - std::conj(b) * s.p13);
  d.p13 = i * (detuning * s.p13 - b * s.p12 + a * (s.p33 - s.p11));
  d.p23 = i * (detuning * s.p23 - a * std::conj(s.p12) + b * (s.p33 - s.p22));
  return d;
}

inline BlochState axpy(const BlochState& y, double h, const BlochState& k) {
  return {y.p11 + h * k.p11, y.p22 + h * k.p22, y.p33 + h * k.p33,
          y.p12 + h * k.p12, y.p13 + h * k.p13, y.p23 + h * k.p23};
}

/// Throws IntegrationFailure at the first non-finite field sample.
void check_finite_fields(std::span<const cplx> omega_a, std::span<const cplx> omega_b);

/// Integrates from `state` at axis.t_min, calling visit(i, state) at every
/// grid sample i (including i = 0).
template <class Visit>
void sweep_atom(BlochState state, double detuning, const StageFields& fields,
                const TimeAxis& axis, Visit&& visit) {
  const int m = fields.substeps;
  const int per = 2 * m;
  const double h = axis.dt() / m;
  const double h6 = h / 6.0;
  const cplx* fa = fields.a.data();
  const cplx* fb = fields.b.data();
  visit(0, state);
  for (int i = 0; i + 1 < axis.n; ++i) {
    for (int k = 0; k < m; ++k) {
      const int j = i * per + 2 * k;
      const BlochState k1 = bloch_derivative(state, fa[j], fb[j], detuning);
      const BlochState k2 = bloch_derivative(axpy(state, 0.5 * h, k1), fa[j + 1], fb[j + 1], detuning);
      const BlochState k3 = bloch_derivative(axpy(state, 0.5 * h, k2), fa[j + 1], fb[j + 1], detuning);
      const BlochState k4 = bloch_derivative(axpy(state, h, k3), fa[j + 2], fb[j + 2], detuning);
      state.p11 += h6 * (k1.p11 + 2.0 * (k2.p11 + k3.p11) + k4.p11);
      state.p22 += h6 * (k1.p22 + 2.0 * (k2.p22 + k3.p22) + k4.p22);
      state.p33 += h6 * (k1.p33 + 2.0 * (k2.p33 + k3.p33) + k4.p33);
      state.p12 += h6 * (k1.p12 + 2.0 * (k2.p12 + k3.p12) + k4.p12);
      state.p13 += h6 * (k1.p13 + 2.0 * (k2.p13 + k3.p13) + k4.p13);
      state.p23 += h6 * (k1.p23 + 2.0 * (k2.p23 + k3.p23) + k4.p23);
    }
    if (!std::isfinite(state.p33) || !std::isfinite(std::abs(state.p13)) ||
        !std::isfinite(std::abs(state.p23)))
      throw IntegrationFailure("Bloch state diverged", static_cast<std::size_t>(i + 1));
    visit(i + 1, state);
  }
}

}  // namespace twopulse
