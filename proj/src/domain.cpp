#include "twopulse/domain.hpp"

#include "twopulse/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twopulse {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) os << "; ";
    os << items[i];
  }
  return os.str();
}

}  // namespace

std::vector<std::string> violations(const MediumPrep& prep) {
  std::vector<std::string> out;
  if (!(prep.alpha2 >= 0.0)) out.emplace_back("alpha2 must be >= 0");
  if (!(prep.beta2 >= 0.0)) out.emplace_back("beta2 must be >= 0");
  if (!(std::abs(prep.alpha2 + prep.beta2 - 1.0) <= 1e-12))
    out.emplace_back("alpha2+beta2 must equal 1");
  if (!std::isfinite(prep.delta_bar)) out.emplace_back("delta_bar must be finite");
  if (prep.t2_star && !(*prep.t2_star > 0.0 && std::isfinite(*prep.t2_star)))
    out.emplace_back("t2_star must be > 0 (use the sharp-line flag instead)");
  if (!(prep.mu > 0.0 && std::isfinite(prep.mu))) out.emplace_back("mu must be > 0");
  if (!(prep.mask.entry < prep.mask.exit))
    out.emplace_back("medium entry face must precede exit face");
  return out;
}

MediumPrep make_medium(double alpha2, double beta2, double delta_bar,
                       std::optional<double> t2_star, double mu,
                       MediumMask mask) {
  MediumPrep prep{alpha2, beta2, delta_bar, t2_star, mu, mask};
  if (auto v = violations(prep); !v.empty()) throw InvalidParameter(join(v));
  return prep;
}

std::vector<std::string> violations(const PulseSpec& spec) {
  std::vector<std::string> out;
  if (!(spec.width > 0.0 && std::isfinite(spec.width)))
    out.emplace_back("pulse width must be > 0");
  if (!(spec.area >= 0.0 && std::isfinite(spec.area)))
    out.emplace_back("pulse area must be >= 0");
  if (!std::isfinite(spec.delay)) out.emplace_back("pulse delay must be finite");
  if (!std::isfinite(spec.phase)) out.emplace_back("pulse phase must be finite");
  return out;
}

std::vector<std::string> violations(const TimeAxis& axis) {
  std::vector<std::string> out;
  if (axis.n < 2) out.emplace_back("time axis needs n_t >= 2");
  if (!(axis.t_max > axis.t_min)) out.emplace_back("time axis must be increasing");
  return out;
}

std::vector<std::string> violations(const SimulationGrid& grid) {
  auto out = violations(grid.t);
  if (grid.n_z < 1) out.emplace_back("n_z must be >= 1");
  if (!(grid.z_max > grid.z_min)) out.emplace_back("Z axis must be increasing");
  if (grid.doppler.empty()) {
    out.emplace_back("Doppler quadrature is empty");
  } else {
    double sum = 0.0;
    for (const auto& node : grid.doppler) {
      sum += node.weight;
      if (!(node.weight > 0.0)) out.emplace_back("Doppler weights must be positive");
    }
    if (std::abs(sum - 1.0) > 1e-12) out.emplace_back("Doppler weights must sum to 1");
  }
  return out;
}

DensityMatrix3 DensityMatrix3::diagonal(double p1, double p2, double p3) {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 0) = p1;
  m(1, 1) = p2;
  m(2, 2) = p3;
  return DensityMatrix3(m);
}

double DensityMatrix3::min_eigenvalue() const {
  // Symmetrise so round-off asymmetry cannot leak into the solver.
  const Eigen::Matrix3cd h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<std::string> DensityMatrix3::check(double tol, double psd_tol) const {
  std::vector<std::string> out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (std::abs(m_(i, j) - std::conj(m_(j, i))) > tol) {
        out.emplace_back("not Hermitian");
        i = 3;
        break;
      }
    }
  }
  if (std::abs(trace() - 1.0) > tol) out.emplace_back("trace != 1");
  for (int i = 0; i < 3; ++i) {
    const double p = m_(i, i).real();
    if (p < -tol || p > 1.0 + tol) {
      out.emplace_back("population outside [0,1]");
      break;
    }
  }
  if (min_eigenvalue() < -psd_tol) out.emplace_back("not positive semidefinite");
  return out;
}

// Gauss-Hermite nodes by Newton iteration on the orthonormal Hermite
// recurrence, with the usual asymptotic initial guesses.
static void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
  constexpr double kEps = 1e-15;
  const double pim4 = 1.0 / std::pow(kPi, 0.25);
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int its = 0; its < 100; ++its) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kEps * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
}

std::vector<DopplerNode> make_doppler_quadrature(double delta_bar,
                                                 std::optional<double> t2_star,
                                                 int n_nodes) {
  if (n_nodes < 1) throw InvalidParameter("n_nodes must be >= 1");
  if (!t2_star) {
    if (n_nodes != 1) throw InvalidParameter("a sharp line takes exactly one node");
    return {{delta_bar, 1.0}};
  }
  if (!(*t2_star > 0.0) || !std::isfinite(*t2_star))
    throw InvalidParameter("t2_star must be > 0 (use the sharp-line flag instead)");

  std::vector<double> x, w;
  gauss_hermite(n_nodes, x, w);
  const double scale = std::sqrt(2.0) / *t2_star;
  double sum = 0.0;
  for (double wi : w) sum += wi;

  std::vector<DopplerNode> nodes(n_nodes);
  for (int i = 0; i < n_nodes; ++i)
    nodes[i] = {delta_bar + scale * x[i], w[i] / sum};
  std::sort(nodes.begin(), nodes.end(),
            [](const DopplerNode& a, const DopplerNode& b) { return a.detuning < b.detuning; });
  return nodes;
}

DensityMatrix3 initial_density(const MediumPrep& prep) {
  return DensityMatrix3::diagonal(prep.alpha2, prep.beta2, 0.0);
}

SampledPulse sample_input_pulse(const PulseSpec& spec, const TimeAxis& axis) {
  if (auto v = violations(spec); !v.empty()) throw InvalidParameter(join(v));
  if (auto v = violations(axis); !v.empty()) throw InvalidParameter(join(v));

  SampledPulse out;
  out.envelope.resize(axis.size());
  const cplx carrier = std::polar(1.0, spec.phase);
  const double tau = spec.width;
  for (int i = 0; i < axis.n; ++i) {
    const double s = (axis.at(i) - spec.delay) / tau;
    double value = 0.0;
    if (spec.shape == PulseShape::gaussian) {
      value = spec.area / (tau * std::sqrt(2.0 * kPi)) * std::exp(-0.5 * s * s);
    } else {
      value = spec.area / (kPi * tau) / std::cosh(s);
    }
    out.envelope[i] = value * carrier;
  }
  if (spec.area > 0.0 &&
      (axis.t_min > spec.delay - 3.0 * tau || axis.t_max < spec.delay + 3.0 * tau)) {
    std::ostringstream os;
    os << "time axis [" << axis.t_min << ", " << axis.t_max
       << "] truncates pulse centred at " << spec.delay << " with width " << tau;
    out.warnings.push_back(os.str());
  }
  return out;
}

}  // namespace twopulse
