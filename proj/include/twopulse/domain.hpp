#pragma once

// Dimensionless domain types shared by every solver.
//
// Units: times in a reference pulse width tau_ref, Rabi frequencies and
// detunings in 1/tau_ref. Propagation distance Z is kept in solver-native
// units; reports convert to kappa*Z.

#include <Eigen/Core>

#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace twopulse {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Piecewise-constant medium occupancy: atoms live in [entry, exit).
struct MediumMask {
  double entry = -kInf;
  double exit = kInf;

  bool occupied(double z) const { return z >= entry && z < exit; }
};

/// Ground-state preparation and line shape of the lambda medium.
struct MediumPrep {
  double alpha2 = 1.0;      // population of level 1
  double beta2 = 0.0;       // population of level 2
  double delta_bar = 0.0;   // line-centre one-photon detuning
  std::optional<double> t2_star;  // inhomogeneous lifetime; empty = sharp line
  double mu = 1.0;          // atom-field coupling (density absorbed)
  MediumMask mask;

  bool sharp_line() const { return !t2_star.has_value(); }
  double inversion() const { return alpha2 - beta2; }
};

/// Every violated invariant of `prep`, empty when valid.
std::vector<std::string> violations(const MediumPrep& prep);

/// Throws InvalidParameter listing all violations.
MediumPrep make_medium(double alpha2, double beta2, double delta_bar,
                       std::optional<double> t2_star, double mu = 1.0,
                       MediumMask mask = {});

enum class Channel { pump_a, stokes_b };
enum class PulseShape { sech, gaussian };

struct PulseSpec {
  Channel channel = Channel::pump_a;
  PulseShape shape = PulseShape::gaussian;
  double area = 0.0;   // radians
  double width = 1.0;  // tau
  double delay = 0.0;
  double phase = 0.0;
};

std::vector<std::string> violations(const PulseSpec& spec);

/// Uniform retarded-time axis with `n` samples on [t_min, t_max].
struct TimeAxis {
  double t_min = 0.0;
  double t_max = 1.0;
  int n = 2;

  double dt() const { return (t_max - t_min) / (n - 1); }
  double at(int i) const { return t_min + i * dt(); }
  std::size_t size() const { return static_cast<std::size_t>(n); }
};

std::vector<std::string> violations(const TimeAxis& axis);

/// One atom class of the inhomogeneous line.
struct DopplerNode {
  double detuning;
  double weight;
};

struct SimulationGrid {
  TimeAxis t;
  double z_min = 0.0;
  double z_max = 1.0;
  int n_z = 1;  // number of Z steps
  std::vector<DopplerNode> doppler;

  double dz() const { return (z_max - z_min) / n_z; }
  double z_at(int k) const { return z_min + k * dz(); }
};

std::vector<std::string> violations(const SimulationGrid& grid);

/// Hermitian 3x3 density matrix. Element access uses level labels 1..3.
class DensityMatrix3 {
 public:
  DensityMatrix3() : m_(Eigen::Matrix3cd::Zero()) {}
  explicit DensityMatrix3(const Eigen::Matrix3cd& m) : m_(m) {}

  static DensityMatrix3 diagonal(double p1, double p2, double p3);

  cplx operator()(int i, int j) const { return m_(i - 1, j - 1); }
  cplx& operator()(int i, int j) { return m_(i - 1, j - 1); }

  const Eigen::Matrix3cd& matrix() const { return m_; }
  cplx trace() const { return m_.trace(); }
  double purity() const { return (m_ * m_).trace().real(); }
  double min_eigenvalue() const;

  /// Violated density-matrix invariants at tolerance `tol` (PSD uses
  /// `psd_tol`).
  std::vector<std::string> check(double tol = 1e-12,
                                 double psd_tol = 1e-10) const;

 private:
  Eigen::Matrix3cd m_;
};

struct FieldState {
  std::vector<cplx> omega_a;
  std::vector<cplx> omega_b;
  double z = 0.0;
};

/// Gauss-Hermite nodes for the Gaussian line centred at delta_bar with
/// width 1/t2_star. A sharp line returns the single node (delta_bar, 1).
std::vector<DopplerNode> make_doppler_quadrature(double delta_bar,
                                                 std::optional<double> t2_star,
                                                 int n_nodes);

DensityMatrix3 initial_density(const MediumPrep& prep);

struct SampledPulse {
  std::vector<cplx> envelope;
  std::vector<std::string> warnings;
};

/// Samples the input envelope of `spec` on `axis`. A warning is recorded when
/// the axis does not cover delay +- 3 width.
SampledPulse sample_input_pulse(const PulseSpec& spec, const TimeAxis& axis);

}  // namespace twopulse
