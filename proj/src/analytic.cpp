#include "twopulse/analytic.hpp"

#include "twopulse/errors.hpp"
#include "twopulse/logspace.hpp"

#include <cmath>

namespace twopulse {

PropagationCoefficients compute_kappa_delta(const MediumPrep& prep, double tau,
                                            std::span<const DopplerNode> quadrature) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParameter("tau must be > 0");
  if (quadrature.empty()) throw InvalidParameter("empty Doppler quadrature");
  const double inv_tau2 = 1.0 / (tau * tau);
  double lorentz = 0.0;
  double dispersive = 0.0;
  for (const auto& node : quadrature) {
    const double denom = node.detuning * node.detuning + inv_tau2;
    lorentz += node.weight / denom;
    dispersive += node.weight * node.detuning / denom;
  }
  return {prep.mu / (2.0 * tau) * lorentz, 0.5 * prep.mu * dispersive, tau};
}

AnalyticSolution make_analytic_solution(const MediumPrep& prep, double tau,
                                        std::span<const DopplerNode> quadrature,
                                        std::array<cplx, 3> u) {
  if (u[0] == 0.0 && u[1] == 0.0 && u[2] == 0.0)
    throw InvalidParameter("u vector must be nonzero");
  AnalyticSolution sol;
  sol.prep = prep;
  sol.coeffs = compute_kappa_delta(prep, tau, quadrature);
  sol.u = u;
  sol.quadrature.assign(quadrature.begin(), quadrature.end());
  return sol;
}

cplx LogComplex::value() const {
  if (log_abs == -kInf) return {0.0, 0.0};
  return std::polar(std::exp(log_abs), phase);
}

namespace {

LogComplex log_of(cplx u) {
  if (u == 0.0) return {};
  return {std::log(std::abs(u)), std::arg(u)};
}

}  // namespace

// The Z exponent is -(kappa + i delta) times the population. The literal
// bracket <1/(1 + i Delta tau)> gives kappa - i delta, which rotates the
// field phase the wrong way relative to the Bloch equations; the conjugate
// bracket keeps arg Omega_a = -alpha2 delta Z.
std::array<LogComplex, 3> s_vector(const AnalyticSolution& sol, double z, double t) {
  const auto& c = sol.coeffs;
  const double half = t / (2.0 * c.tau);
  std::array<LogComplex, 3> s{log_of(sol.u[0]), log_of(sol.u[1]), log_of(sol.u[2])};
  s[0].log_abs += half - sol.prep.alpha2 * c.kappa * z;
  s[0].phase -= sol.prep.alpha2 * c.delta * z;
  s[1].log_abs += half - sol.prep.beta2 * c.kappa * z;
  s[1].phase -= sol.prep.beta2 * c.delta * z;
  s[2].log_abs -= half;
  return s;
}

std::array<cplx, 3> normalized_s(const AnalyticSolution& sol, double z, double t) {
  const auto s = s_vector(sol, z, t);
  const double log_norm =
      0.5 * log_sum_exp({2.0 * s[0].log_abs, 2.0 * s[1].log_abs, 2.0 * s[2].log_abs});
  std::array<cplx, 3> out;
  for (int i = 0; i < 3; ++i)
    out[i] = LogComplex{s[i].log_abs - log_norm, s[i].phase}.value();
  return out;
}

FieldPair analytic_fields(const AnalyticSolution& sol, double z, double t) {
  // Omega_{a,b} = -4 i eta <1,2|s><s|3> / <s|s>, assembled in log space.
  const auto s = s_vector(sol, z, t);
  const double log_norm2 =
      log_sum_exp({2.0 * s[0].log_abs, 2.0 * s[1].log_abs, 2.0 * s[2].log_abs});
  const double log_scale = std::log(4.0 / sol.coeffs.tau);
  const auto field = [&](const LogComplex& si) {
    return LogComplex{log_scale + si.log_abs + s[2].log_abs - log_norm2,
                      si.phase - s[2].phase - 0.5 * kPi}
        .value();
  };
  return {field(s[0]), field(s[1])};
}

namespace {

struct FFunctions {
  double f11, f22;
  cplx f12, f13, f23;
};

FFunctions f_functions(const AnalyticSolution& sol, double z, double t) {
  const auto sh = normalized_s(sol, z, t);
  return {2.0 * std::norm(sh[0]) - 1.0, 2.0 * std::norm(sh[1]) - 1.0,
          2.0 * sh[0] * std::conj(sh[1]), 2.0 * sh[0] * std::conj(sh[2]),
          2.0 * sh[1] * std::conj(sh[2])};
}

DensityMatrix3 density_from_f(const FFunctions& f, double a2, double b2, double d) {
  const double norm = 1.0 / (1.0 + d * d);
  const cplx id{0.0, d};
  DensityMatrix3 rho;
  rho(1, 1) = norm * (a2 * (f.f11 * f.f11 + d * d) + b2 * std::norm(f.f12));
  rho(2, 2) = norm * (a2 * std::norm(f.f12) + b2 * (f.f22 * f.f22 + d * d));
  rho(3, 3) = norm * (a2 * std::norm(f.f13) + b2 * std::norm(f.f23));
  rho(1, 2) = norm * (a2 * (f.f11 - id) * f.f12 + b2 * (f.f22 + id) * f.f12);
  rho(1, 3) = norm * (a2 * (f.f11 - id) * f.f13 + b2 * f.f12 * f.f23);
  rho(2, 3) = norm * (a2 * std::conj(f.f12) * f.f13 + b2 * (f.f22 - id) * f.f23);
  rho(2, 1) = std::conj(rho(1, 2));
  rho(3, 1) = std::conj(rho(1, 3));
  rho(3, 2) = std::conj(rho(2, 3));
  return rho;
}

}  // namespace

DensityMatrix3 analytic_density(const AnalyticSolution& sol, double z, double t,
                                double detuning) {
  return density_from_f(f_functions(sol, z, t), sol.prep.alpha2, sol.prep.beta2,
                        detuning * sol.coeffs.tau);
}

AveragedCoherences averaged_density(const AnalyticSolution& sol, double z, double t) {
  const auto f = f_functions(sol, z, t);
  AveragedCoherences avg{{0.0, 0.0}, {0.0, 0.0}, 0.0};
  for (const auto& node : sol.quadrature) {
    const auto rho = density_from_f(f, sol.prep.alpha2, sol.prep.beta2,
                                    node.detuning * sol.coeffs.tau);
    avg.rho13 += node.weight * rho(1, 3);
    avg.rho23 += node.weight * rho(2, 3);
    avg.rho33 += node.weight * rho(3, 3).real();
  }
  return avg;
}

FieldPair asymptotic_fields(const AnalyticSolution& sol, Regime regime, double z, double t) {
  const auto& c = sol.coeffs;
  const auto soliton = [&](double pop) {
    const double arg = t / c.tau - pop * c.kappa * z;
    return std::polar(2.0 / (c.tau * std::cosh(arg)), -pop * c.delta * z);
  };
  if (regime == Regime::input) return {soliton(sol.prep.alpha2), {0.0, 0.0}};
  return {{0.0, 0.0}, soliton(sol.prep.beta2)};
}

AnalyticSolution backlund_dress(const DensityMatrix3& proto_rho, FieldPair proto_fields,
                                const MediumPrep& prep, double tau,
                                std::span<const DopplerNode> quadrature) {
  constexpr double kTol = 1e-14;
  if (std::abs(proto_fields.a) > 0.0 || std::abs(proto_fields.b) > 0.0)
    throw UnsupportedProto("proto-solution fields must vanish");
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      if (i != j && std::abs(proto_rho(i, j)) > kTol)
        throw UnsupportedProto("proto-solution density must be diagonal");
  if (std::abs(proto_rho(3, 3)) > kTol)
    throw UnsupportedProto("proto-solution must leave the excited state empty");

  MediumPrep dressed = prep;
  dressed.alpha2 = proto_rho(1, 1).real();
  dressed.beta2 = proto_rho(2, 2).real();
  if (auto v = violations(dressed); !v.empty())
    throw InvalidParameter("invalid proto-solution populations: " + v.front());
  return make_analytic_solution(dressed, tau, quadrature);
}

namespace {

Eigen::Matrix3cd projector(const AnalyticSolution& sol, double z, double t) {
  const auto sh = normalized_s(sol, z, t);
  Eigen::Vector3cd v(sh[0], sh[1], sh[2]);
  return v * v.adjoint();
}

}  // namespace

FieldPair dressed_fields(const AnalyticSolution& sol, double z, double t) {
  const double eta = 1.0 / sol.coeffs.tau;
  const Eigen::Matrix3cd p = projector(sol, z, t);
  Eigen::Matrix3cd w = Eigen::Matrix3cd::Zero();
  w(0, 0) = cplx{0.0, -0.5};
  w(1, 1) = cplx{0.0, -0.5};
  w(2, 2) = cplx{0.0, 0.5};
  // The proto fields vanish, so U0 = 0.
  const Eigen::Matrix3cd u = cplx{0.0, -2.0 * eta} * (w * p - p * w);
  const cplx two_i{0.0, 2.0};
  return {two_i * u(0, 2), two_i * u(1, 2)};
}

DensityMatrix3 dressed_density(const AnalyticSolution& sol, double z, double t,
                               double detuning) {
  const double d = detuning * sol.coeffs.tau;
  const Eigen::Matrix3cd p = projector(sol, z, t);
  const Eigen::Matrix3cd a =
      2.0 * p - cplx{1.0, d} * Eigen::Matrix3cd::Identity();
  const Eigen::Matrix3cd rho0 =
      initial_density(sol.prep).matrix();
  return DensityMatrix3((a * rho0 * a.adjoint()) / (1.0 + d * d));
}

FieldState sample_analytic_fields(const AnalyticSolution& sol, double z, const TimeAxis& axis) {
  FieldState state;
  state.z = z;
  state.omega_a.resize(axis.size());
  state.omega_b.resize(axis.size());
  for (int i = 0; i < axis.n; ++i) {
    const auto f = analytic_fields(sol, z, axis.at(i));
    state.omega_a[i] = f.a;
    state.omega_b[i] = f.b;
  }
  return state;
}

}  // namespace twopulse
