#include "twopulse/maxwell.hpp"

#include "twopulse/bloch.hpp"
#include "twopulse/analytic.hpp"
#include "twopulse/march.hpp"
#include "twopulse/trapezoid_march.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace twopulse {

int class_substeps(double detuning, double dt, const PropagationSettings& settings) {
  int m = std::max(settings.substeps, 1);
  if (settings.stiff_phase_limit > 0.0)
    m = std::max(m, static_cast<int>(std::ceil(std::abs(detuning) * dt / settings.stiff_phase_limit)));
  return m;
}

Polarization polarization(const FieldState& fields, const MediumPrep& prep,
                          const SimulationGrid& grid, const PropagationSettings& settings) {
  const TimeAxis& axis = grid.t;
  if (fields.omega_a.size() != axis.size() || fields.omega_b.size() != axis.size())
    throw InvalidParameter("field envelopes must be sampled on the time axis");
  check_finite_fields(fields.omega_a, fields.omega_b);

  Polarization out;
  out.a.assign(axis.size(), cplx{});
  out.b.assign(axis.size(), cplx{});
  out.rho33.assign(axis.size(), 0.0);

  const BlochState start = to_state(initial_density(prep));
  std::map<int, StageFields> tables;
  for (const auto& node : grid.doppler) {
    const int m = class_substeps(node.detuning, axis.dt(), settings);
    auto it = tables.find(m);
    if (it == tables.end())
      it = tables.emplace(m, make_stage_fields(fields.omega_a, fields.omega_b, m)).first;
    const double w = node.weight;
    sweep_atom(start, node.detuning, it->second, axis, [&](int i, const BlochState& s) {
      out.a[i] += w * s.p13;
      out.b[i] += w * s.p23;
      out.rho33[i] += w * s.p33;
    });
  }
  return out;
}

namespace {

class FullModel {
 public:
  FullModel(const MediumPrep& prep, const SimulationGrid& grid,
            const PropagationSettings& settings)
      : prep_(prep), grid_(grid), settings_(settings) {}

  Polarization respond(const FieldState& fields) const {
    return polarization(fields, prep_, grid_, settings_);
  }

  void advance(const FieldState& from, double dz, const Polarization& p, FieldState& to) const {
    const cplx factor = cplx{0.0, -prep_.mu * dz};
    to.omega_a.resize(from.omega_a.size());
    to.omega_b.resize(from.omega_b.size());
    for (std::size_t i = 0; i < from.omega_a.size(); ++i) {
      to.omega_a[i] = from.omega_a[i] + factor * p.a[i];
      to.omega_b[i] = from.omega_b[i] + factor * p.b[i];
    }
  }

  // The field change over one step must not exceed the field itself;
  // otherwise the explicit update is not resolving the absorption length.
  void check(const FieldState& fields, const Polarization& p, double dz) const {
    double field = 0.0, pol = 0.0;
    for (std::size_t i = 0; i < p.a.size(); ++i) {
      field = std::max({field, std::abs(fields.omega_a[i]), std::abs(fields.omega_b[i])});
      pol = std::max({pol, std::abs(p.a[i]), std::abs(p.b[i])});
    }
    if (dz * prep_.mu * pol > field) {
      std::ostringstream os;
      os << "Z step " << dz << " too coarse at Z = " << fields.z << ": field change "
         << dz * prep_.mu * pol << " exceeds field " << field << "; reduce dz";
      throw ResolutionError(os.str(), fields.z);
    }
  }

  double mu() const { return prep_.mu; }

 private:
  const MediumPrep& prep_;
  const SimulationGrid& grid_;
  const PropagationSettings& settings_;
};

class FullTrapezoidModel {
 public:
  using State = BlochState;
  struct Source {
    cplx a{};
    cplx b{};
    double rho33 = 0.0;
  };
  static constexpr int kUpstream = 2;

  FullTrapezoidModel(const MediumPrep& prep, const SimulationGrid& grid,
                     const PropagationSettings& settings)
      : prep_(prep), doppler_(grid.doppler), start_(to_state(initial_density(prep))) {
    if (settings.dispersive_frame) {
      const double delta = compute_kappa_delta(prep, settings.tau, doppler_).delta;
      q_a_ = prep.alpha2 * delta;
      q_b_ = prep.beta2 * delta;
    }
  }

  int classes() const { return static_cast<int>(doppler_.size()); }
  State initial(int) const { return start_; }
  State derivative(const State& s, int c, cplx a, cplx b) const {
    return bloch_derivative(s, a, b, doppler_[c].detuning);
  }
  bool finite(const State& s) const {
    return std::isfinite(s.p33) && std::isfinite(std::abs(s.p13)) && std::isfinite(std::abs(s.p23));
  }
  Source source(std::span<const State> node) const {
    Source out;
    for (std::size_t c = 0; c < node.size(); ++c) {
      const double w = doppler_[c].weight;
      out.a += w * node[c].p13;
      out.b += w * node[c].p23;
      out.rho33 += w * node[c].p33;
    }
    return out;
  }

  // Trapezoid rule for d(Omega)/dZ = -i mu P written for e^{iqZ} Omega:
  //   Omega1 (1 - i q dz/2) = e^{-iq dz} (Omega0 + dz/2 N0) - i mu dz/2 P1,
  // with N = -i mu P + i q Omega. The upstream part is the first term.
  std::array<cplx, 2> upstream(cplx a, cplx b, const Source& s, double dz) const {
    return {carry(a, s.a, q_a_, dz), carry(b, s.b, q_b_, dz)};
  }
  FieldPair closure(const std::array<cplx, 2>& up, const Source& s, double dz) const {
    const cplx i{0.0, 1.0};
    return {(up[0] - i * prep_.mu * 0.5 * dz * s.a) / (1.0 - i * q_a_ * 0.5 * dz),
            (up[1] - i * prep_.mu * 0.5 * dz * s.b) / (1.0 - i * q_b_ * 0.5 * dz)};
  }
  cplx rotation_a(double dz) const { return std::polar(1.0, -q_a_ * dz); }
  cplx rotation_b(double dz) const { return std::polar(1.0, -q_b_ * dz); }
  double mu() const { return prep_.mu; }

 private:
  cplx carry(cplx field, cplx p, double q, double dz) const {
    const cplx i{0.0, 1.0};
    return std::polar(1.0, -q * dz) * (field + 0.5 * dz * (-i * prep_.mu * p + i * q * field));
  }

  const MediumPrep& prep_;
  const std::vector<DopplerNode>& doppler_;
  BlochState start_;
  double q_a_ = 0.0;
  double q_b_ = 0.0;
};

}  // namespace

PropagationResult propagate(const FieldState& input, const MediumPrep& prep,
                            const SimulationGrid& grid, const PropagationSettings& settings) {
  if (const auto v = violations(prep); !v.empty()) throw InvalidParameter(v.front());
  if (grid.doppler.empty()) throw InvalidParameter("grid has no Doppler nodes");
  if (settings.scheme == ZScheme::midpoint) {
    const FullModel model(prep, grid, settings);
    return march(input, grid, prep.mask, settings, model);
  }
  int m = 1;
  for (const auto& node : grid.doppler)
    m = std::max(m, class_substeps(node.detuning, grid.t.dt(), settings));
  const FullTrapezoidModel model(prep, grid, settings);
  return trapezoid_march(input, grid, prep.mask, settings, model, m);
}

}  // namespace twopulse
