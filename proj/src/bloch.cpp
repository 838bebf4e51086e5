#include "twopulse/bloch.hpp"

#include <sstream>

namespace twopulse {

DensityMatrix3 bloch_rhs(const DensityMatrix3& rho, cplx omega_a, cplx omega_b,
                         double detuning) {
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  h(2, 2) = detuning;
  h(0, 2) = -0.5 * omega_a;
  h(1, 2) = -0.5 * omega_b;
  h(2, 0) = -0.5 * std::conj(omega_a);
  h(2, 1) = -0.5 * std::conj(omega_b);
  const Eigen::Matrix3cd& r = rho.matrix();
  return DensityMatrix3(cplx{0.0, -1.0} * (h * r - r * h));
}

BlochState to_state(const DensityMatrix3& rho) {
  return {rho(1, 1).real(), rho(2, 2).real(), rho(3, 3).real(),
          rho(1, 2), rho(1, 3), rho(2, 3)};
}

DensityMatrix3 to_matrix(const BlochState& s) {
  DensityMatrix3 rho = DensityMatrix3::diagonal(s.p11, s.p22, s.p33);
  rho(1, 2) = s.p12;
  rho(1, 3) = s.p13;
  rho(2, 3) = s.p23;
  rho(2, 1) = std::conj(s.p12);
  rho(3, 1) = std::conj(s.p13);
  rho(3, 2) = std::conj(s.p23);
  return rho;
}

void check_finite_fields(std::span<const cplx> omega_a, std::span<const cplx> omega_b) {
  for (std::size_t i = 0; i < omega_a.size(); ++i) {
    if (!std::isfinite(omega_a[i].real()) || !std::isfinite(omega_a[i].imag()) ||
        !std::isfinite(omega_b[i].real()) || !std::isfinite(omega_b[i].imag())) {
      std::ostringstream os;
      os << "non-finite field sample at T index " << i;
      throw IntegrationFailure(os.str(), i);
    }
  }
}

std::vector<DensityMatrix3> integrate_atom(const AtomClassState& initial,
                                           std::span<const cplx> omega_a,
                                           std::span<const cplx> omega_b,
                                           const TimeAxis& axis, int substeps) {
  if (substeps < 1) throw InvalidParameter("substeps must be >= 1");
  if (omega_a.size() != axis.size() || omega_b.size() != axis.size())
    throw InvalidParameter("field envelopes must be sampled on the time axis");
  check_finite_fields(omega_a, omega_b);

  std::vector<DensityMatrix3> out(axis.size());
  const StageFields fields = make_stage_fields(omega_a, omega_b, substeps);
  sweep_atom(to_state(initial.rho), initial.detuning, fields, axis,
             [&](int i, const BlochState& s) { out[i] = to_matrix(s); });
  return out;
}

void check_leading_margin(const TimeAxis& axis, double earliest_centre, double tau) {
  if (axis.t_min > earliest_centre - 6.0 * tau) {
    std::ostringstream os;
    os << "time axis starts at " << axis.t_min << " but must begin at least 6 tau ("
       << 6.0 * tau << ") before the earliest pulse centre " << earliest_centre;
    throw InvalidParameter(os.str());
  }
}

}  // namespace twopulse
