#include "twopulse/adiabatic.hpp"

#include "twopulse/bloch.hpp"
#include "twopulse/errors.hpp"
#include "twopulse/march.hpp"
#include "twopulse/trapezoid_march.hpp"
#include "twopulse/stage_interp.hpp"

#include <cmath>
#include <sstream>

namespace twopulse {

std::vector<std::string> GroundDensityMatrix2::check(double tol) const {
  std::vector<std::string> out;
  if (std::abs(r11 + r22 - 1.0) > tol) out.push_back("ground trace differs from 1");
  if (r11 < -tol || r22 < -tol) out.push_back("negative ground population");
  if (std::norm(r12) > r11 * r22 + tol) out.push_back("ground density not positive semidefinite");
  return out;
}

cplx two_photon_rabi(cplx omega_a, cplx omega_b, double delta_bar) {
  return omega_a * std::conj(omega_b) / (2.0 * delta_bar);
}

double two_photon_stark(cplx omega_a, cplx omega_b, double delta_bar) {
  return (std::norm(omega_a) - std::norm(omega_b)) / (4.0 * delta_bar);
}

namespace {

GroundDerivative derivative_of(const GroundDensityMatrix2& r, cplx omega_a, cplx omega_b,
                            double delta_bar) {
  const cplx i{0.0, 1.0};
  const cplx w = two_photon_rabi(omega_a, omega_b, delta_bar);
  const double stark = two_photon_stark(omega_a, omega_b, delta_bar);
  const cplx r21 = std::conj(r.r12);
  GroundDerivative d;
  d.d11 = std::real(i * (w / 2.0) * r21 - i * (std::conj(w) / 2.0) * r.r12);
  d.d22 = -d.d11;
  d.d12 = i * (w / 2.0) * (r.r22 - r.r11) + i * stark * r.r12;
  return d;
}

GroundDensityMatrix2 axpy(const GroundDensityMatrix2& y, double h, const GroundDerivative& k) {
  return {y.r11 + h * k.d11, y.r22 + h * k.d22, y.r12 + h * k.d12};
}

}  // namespace

GroundDensityMatrix2 axpy(const GroundDensityMatrix2& y, double h, const GroundDensityMatrix2& k) {
  return {y.r11 + h * k.r11, y.r22 + h * k.r22, y.r12 + h * k.r12};
}

GroundDerivative reduced_bloch_rhs(const GroundDensityMatrix2& rho, cplx omega_a, cplx omega_b,
                                   double delta_bar) {
  if (delta_bar == 0.0)
    throw InvalidParameter("adiabatic model is undefined on resonance (delta_bar = 0)");
  return derivative_of(rho, omega_a, omega_b, delta_bar);
}

GroundTrajectory reduced_response(const FieldState& fields, const MediumPrep& prep,
                                  const TimeAxis& axis, int substeps) {
  if (prep.delta_bar == 0.0)
    throw InvalidParameter("adiabatic model is undefined on resonance (delta_bar = 0)");
  check_finite_fields(fields.omega_a, fields.omega_b);
  const StageFields f = make_stage_fields(fields.omega_a, fields.omega_b, substeps);
  const int m = f.substeps;
  const int per = 2 * m;
  const double h = axis.dt() / m;
  const double db = prep.delta_bar;

  GroundTrajectory out;
  out.r11.resize(axis.size());
  out.r22.resize(axis.size());
  out.r12.resize(axis.size());
  out.rho33.assign(axis.size(), 0.0);

  GroundDensityMatrix2 s{prep.alpha2, prep.beta2, {}};
  const auto store = [&](int i) {
    out.r11[i] = s.r11;
    out.r22[i] = s.r22;
    out.r12[i] = s.r12;
  };
  store(0);
  for (int i = 0; i + 1 < axis.n; ++i) {
    for (int k = 0; k < m; ++k) {
      const int j = i * per + 2 * k;
      const auto k1 = derivative_of(s, f.a[j], f.b[j], db);
      const auto k2 = derivative_of(axpy(s, 0.5 * h, k1), f.a[j + 1], f.b[j + 1], db);
      const auto k3 = derivative_of(axpy(s, 0.5 * h, k2), f.a[j + 1], f.b[j + 1], db);
      const auto k4 = derivative_of(axpy(s, h, k3), f.a[j + 2], f.b[j + 2], db);
      s.r11 += h / 6.0 * (k1.d11 + 2.0 * (k2.d11 + k3.d11) + k4.d11);
      s.r22 += h / 6.0 * (k1.d22 + 2.0 * (k2.d22 + k3.d22) + k4.d22);
      s.r12 += h / 6.0 * (k1.d12 + 2.0 * (k2.d12 + k3.d12) + k4.d12);
    }
    if (!std::isfinite(s.r11) || !std::isfinite(std::abs(s.r12)))
      throw IntegrationFailure("ground state diverged", static_cast<std::size_t>(i + 1));
    store(i + 1);
  }
  return out;
}

namespace {

// exp(-i phi R) applied to (a, b), R the Hermitian 2x2 ground density.
FieldPair rotate(cplx a, cplx b, double r11, double r22, cplx r12, double phi) {
  const cplx i{0.0, 1.0};
  const double r0 = 0.5 * (r11 + r22);
  const double rz = 0.5 * (r11 - r22);
  const double len = std::sqrt(rz * rz + std::norm(r12));
  const double c = std::cos(phi * len);
  const double s = len > 0.0 ? std::sin(phi * len) / len : phi;
  const cplx global = std::exp(-i * phi * r0);
  return {global * (c * a - i * s * (rz * a + r12 * b)),
          global * (c * b - i * s * (std::conj(r12) * a - rz * b))};
}

// The reduced Maxwell equations read dOmega/dZ = -i c R Omega with R the
// Hermitian ground density and c = mu / (2 delta_bar), so every field update
// is a unitary rotation. This keeps |Omega_a|^2 + |Omega_b|^2 exact at every
// T, as the model demands.
class ReducedModel {
 public:
  ReducedModel(const MediumPrep& prep, const SimulationGrid& grid,
               const PropagationSettings& settings)
      : prep_(prep), grid_(grid), settings_(settings) {}

  GroundTrajectory respond(const FieldState& fields) const {
    return reduced_response(fields, prep_, grid_.t, std::max(settings_.substeps, 1));
  }

  void advance(const FieldState& from, double dz, const GroundTrajectory& r,
               FieldState& to) const {
    const double phi = prep_.mu / (2.0 * prep_.delta_bar) * dz;
    to.omega_a.resize(from.omega_a.size());
    to.omega_b.resize(from.omega_b.size());
    for (std::size_t n = 0; n < from.omega_a.size(); ++n) {
      const FieldPair f = rotate(from.omega_a[n], from.omega_b[n], r.r11[n], r.r22[n], r.r12[n], phi);
      to.omega_a[n] = f.a;
      to.omega_b[n] = f.b;
    }
  }

  void check(const FieldState&, const GroundTrajectory&, double) const {}

  double mu() const { return prep_.mu; }

 private:
  const MediumPrep& prep_;
  const SimulationGrid& grid_;
  const PropagationSettings& settings_;
};

// Trapezoid form: Omega_{k+1} = exp(-i c dz (R_k + R_{k+1}) / 2) Omega_k.
class ReducedTrapezoidModel {
 public:
  using State = GroundDensityMatrix2;
  struct Source {
    double r11 = 0.0;
    double r22 = 0.0;
    cplx r12{};
    double rho33 = 0.0;
  };
  static constexpr int kUpstream = 4;

  explicit ReducedTrapezoidModel(const MediumPrep& prep)
      : prep_(prep), c_(prep.mu / (2.0 * prep.delta_bar)) {}

  int classes() const { return 1; }
  State initial(int) const { return {prep_.alpha2, prep_.beta2, {}}; }
  State derivative(const State& s, int, cplx a, cplx b) const {
    const GroundDerivative d = derivative_of(s, a, b, prep_.delta_bar);
    return {d.d11, d.d22, d.d12};
  }
  bool finite(const State& s) const { return std::isfinite(s.r11) && std::isfinite(std::abs(s.r12)); }
  Source source(std::span<const State> node) const {
    return {node[0].r11, node[0].r22, node[0].r12, 0.0};
  }
  std::array<cplx, 4> upstream(cplx a, cplx b, const Source& s, double) const {
    return {a, b, cplx{s.r11, s.r22}, s.r12};
  }
  FieldPair closure(const std::array<cplx, 4>& up, const Source& s, double dz) const {
    return rotate(up[0], up[1], 0.5 * (up[2].real() + s.r11), 0.5 * (up[2].imag() + s.r22),
                  0.5 * (up[3] + s.r12), c_ * dz);
  }
  cplx rotation_a(double dz) const { return std::polar(1.0, -c_ * prep_.alpha2 * dz); }
  cplx rotation_b(double dz) const { return std::polar(1.0, -c_ * prep_.beta2 * dz); }
  double mu() const { return prep_.mu; }

 private:
  const MediumPrep& prep_;
  double c_;
};

}  // namespace

PropagationResult reduced_propagate(const FieldState& input, const MediumPrep& prep,
                                    const SimulationGrid& grid,
                                    const PropagationSettings& settings) {
  if (const auto v = violations(prep); !v.empty()) throw InvalidParameter(v.front());
  if (!prep.sharp_line())
    throw InvalidParameter("the adiabatic model neglects inhomogeneous broadening; use a sharp line");
  if (prep.delta_bar == 0.0)
    throw InvalidParameter("adiabatic model is undefined on resonance (delta_bar = 0)");
  if (settings.scheme == ZScheme::midpoint) {
    const ReducedModel model(prep, grid, settings);
    return march(input, grid, prep.mask, settings, model);
  }
  const ReducedTrapezoidModel model(prep);
  return trapezoid_march(input, grid, prep.mask, settings, model, std::max(settings.substeps, 1));
}

double next_order_estimate(double theta_a, double alpha2, double tau, double delta_bar) {
  const double x = tau * delta_bar;
  return std::abs(theta_a * alpha2 / 2.0) / (x * x);
}

}  // namespace twopulse
