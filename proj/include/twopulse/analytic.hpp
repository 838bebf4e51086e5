#pragma once

// Closed-form single-soliton two-pulse solutions obtained by dressing the
// trivial proto-solution (zero fields, diagonal ground-state populations).

#include "twopulse/domain.hpp"

#include <array>
#include <span>
#include <vector>

namespace twopulse {

/// kappa: absorption scale, delta: dispersive shift (both per native Z),
/// tau: soliton width (inverse of the dressing parameter eta).
struct PropagationCoefficients {
  double kappa = 0.0;
  double delta = 0.0;
  double tau = 1.0;
};

PropagationCoefficients compute_kappa_delta(const MediumPrep& prep, double tau,
                                            std::span<const DopplerNode> quadrature);

struct AnalyticSolution {
  MediumPrep prep;
  PropagationCoefficients coeffs;
  std::array<cplx, 3> u{cplx{1.0, 0.0}, cplx{1.0, 0.0}, cplx{0.0, -1.0}};
  std::vector<DopplerNode> quadrature;
};

inline constexpr std::array<cplx, 3> kDefaultU{cplx{1.0, 0.0}, cplx{1.0, 0.0},
                                               cplx{0.0, -1.0}};

AnalyticSolution make_analytic_solution(const MediumPrep& prep, double tau,
                                        std::span<const DopplerNode> quadrature,
                                        std::array<cplx, 3> u = kDefaultU);

/// A complex number stored as log-magnitude and phase.
struct LogComplex {
  double log_abs = -kInf;
  double phase = 0.0;

  cplx value() const;
};

/// Components <i|s> of the dressing vector, in log space.
std::array<LogComplex, 3> s_vector(const AnalyticSolution& sol, double z, double t);

/// s / |s|, finite for any (z, t).
std::array<cplx, 3> normalized_s(const AnalyticSolution& sol, double z, double t);

struct FieldPair {
  cplx a;
  cplx b;
};

/// Pump and Stokes envelopes of the two-pulse soliton at (z, t).
FieldPair analytic_fields(const AnalyticSolution& sol, double z, double t);

/// Density matrix of the atom class with detuning `detuning` at (z, t).
DensityMatrix3 analytic_density(const AnalyticSolution& sol, double z, double t,
                                double detuning);

enum class Regime { input, output };

/// sech limits of the soliton far before (input) or after (output) transfer.
FieldPair asymptotic_fields(const AnalyticSolution& sol, Regime regime, double z, double t);

/// Builds the dressed solution from a diagonal, field-free proto-solution.
/// Throws UnsupportedProto for anything else.
AnalyticSolution backlund_dress(const DensityMatrix3& proto_rho, FieldPair proto_fields,
                                const MediumPrep& prep, double tau,
                                std::span<const DopplerNode> quadrature);

/// Fields from U = U0 - 2i eta [W, P], P = |s><s| / <s|s>.
FieldPair dressed_fields(const AnalyticSolution& sol, double z, double t);

/// Density matrix from the dressing of rho0 with (2P - 1 -+ i detuning tau).
DensityMatrix3 dressed_density(const AnalyticSolution& sol, double z, double t,
                               double detuning);

/// Doppler averages of rho13, rho23 and rho33 over the solution quadrature.
struct AveragedCoherences {
  cplx rho13;
  cplx rho23;
  double rho33;
};

AveragedCoherences averaged_density(const AnalyticSolution& sol, double z, double t);

/// Samples the analytic fields on `axis` at position z.
FieldState sample_analytic_fields(const AnalyticSolution& sol, double z, const TimeAxis& axis);

}  // namespace twopulse
