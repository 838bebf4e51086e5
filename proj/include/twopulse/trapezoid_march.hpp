#pragma once

// Implicit trapezoid march in Z. Slab k+1 is solved over the whole T axis
// with its field given by the trapezoid rule
//   Omega_{k+1}(T) = closure(upstream_k(T), source_{k+1}(T)),
// which is algebraic in the slab's own atoms, so each RK4 stage in T closes
// the field before evaluating the Bloch derivatives. Upstream data are
// tabulated on the stage times by cubic interpolation.
//
// A Model provides
//   using State;  using Source;        // Source has double rho33
//   static constexpr int kUpstream;    // complex components per T sample
//   int classes() const;
//   State initial(int c) const;
//   State derivative(const State&, int c, cplx a, cplx b) const;
//   bool finite(const State&) const;
//   Source source(std::span<const State>) const;
//   std::array<cplx, kUpstream> upstream(cplx a, cplx b, const Source&, double dz) const;
//   FieldPair closure(const std::array<cplx, kUpstream>&, const Source&, double dz) const;
//   cplx rotation_a(double dz) const;  cplx rotation_b(double dz) const;
//   double mu() const;
// and a free function axpy(State, double, State).

#include "twopulse/analytic.hpp"
#include "twopulse/diagnostics.hpp"
#include "twopulse/domain.hpp"
#include "twopulse/errors.hpp"
#include "twopulse/march.hpp"
#include "twopulse/propagation.hpp"
#include "twopulse/stage_interp.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace twopulse {

template <class Source>
struct SlabHistory {
  FieldState fields;
  std::vector<Source> sources;  // empty when the slab holds no atoms

  std::vector<double> rho33() const {
    std::vector<double> out(fields.omega_a.size(), 0.0);
    for (std::size_t i = 0; i < sources.size(); ++i) out[i] = sources[i].rho33;
    return out;
  }
};

/// RK4 over the T axis for every atom class of one slab. field_at(index,
/// source) returns the slab field at stage-table index `index`.
template <class Model, class FieldAt>
SlabHistory<typename Model::Source> sweep_slab(const Model& model, const TimeAxis& axis,
                                               int substeps, FieldAt&& field_at) {
  using State = typename Model::State;
  using Source = typename Model::Source;
  const int n_c = model.classes();
  const int m = substeps;
  const int per = 2 * m;
  const double h = axis.dt() / m;

  SlabHistory<Source> out;
  out.fields.omega_a.resize(axis.size());
  out.fields.omega_b.resize(axis.size());
  out.sources.resize(axis.size());

  std::vector<State> y(n_c), tmp(n_c), k1(n_c), k2(n_c), k3(n_c), k4(n_c);
  for (int c = 0; c < n_c; ++c) y[c] = model.initial(c);

  const auto eval = [&](const std::vector<State>& state, int index, std::vector<State>& slope,
                        int record) {
    const Source src = model.source(std::span<const State>(state));
    const FieldPair f = field_at(index, src);
    if (record >= 0) {
      out.fields.omega_a[record] = f.a;
      out.fields.omega_b[record] = f.b;
      out.sources[record] = src;
    }
    for (int c = 0; c < n_c; ++c) slope[c] = model.derivative(state[c], c, f.a, f.b);
  };
  const auto combine = [&](const std::vector<State>& base, double step,
                           const std::vector<State>& slope, std::vector<State>& dst) {
    for (int c = 0; c < n_c; ++c) dst[c] = axpy(base[c], step, slope[c]);
  };

  for (int i = 0; i + 1 < axis.n; ++i) {
    for (int s = 0; s < m; ++s) {
      const int j = i * per + 2 * s;
      eval(y, j, k1, s == 0 ? i : -1);
      combine(y, 0.5 * h, k1, tmp);
      eval(tmp, j + 1, k2, -1);
      combine(y, 0.5 * h, k2, tmp);
      eval(tmp, j + 1, k3, -1);
      combine(y, h, k3, tmp);
      eval(tmp, j + 2, k4, -1);
      combine(y, h / 6.0, k1, y);
      combine(y, h / 3.0, k2, y);
      combine(y, h / 3.0, k3, y);
      combine(y, h / 6.0, k4, y);
    }
    for (int c = 0; c < n_c; ++c)
      if (!model.finite(y[c]))
        throw IntegrationFailure("medium state diverged", static_cast<std::size_t>(i + 1));
  }
  eval(y, (axis.n - 1) * per, k1, axis.n - 1);
  return out;
}

template <class Model>
PropagationResult trapezoid_march(const FieldState& input, const SimulationGrid& grid,
                                  const MediumMask& mask, const PropagationSettings& settings,
                                  const Model& model, int substeps) {
  using Source = typename Model::Source;
  constexpr int kUp = Model::kUpstream;

  if (const auto v = violations(grid); !v.empty()) throw InvalidParameter(v.front());
  if (input.omega_a.size() != grid.t.size() || input.omega_b.size() != grid.t.size())
    throw InvalidParameter("entry fields must be sampled on the time axis");
  check_finite_fields(input.omega_a, input.omega_b);

  const TimeAxis& axis = grid.t;
  const double dz = grid.dz();
  const int m = std::max(substeps, 1);
  const auto wanted = detail::station_flags(grid, settings);
  const auto step_occupied = [&](int k) { return mask.occupied(grid.z_at(k) + 0.5 * dz); };
  const auto needs_atoms = [&](int k) {
    return (k < grid.n_z && step_occupied(k)) || (k > 0 && step_occupied(k - 1));
  };
  const auto with_z = [&](const IntegrationFailure& e, double z) {
    std::ostringstream os;
    os << e.what() << " at Z = " << z;
    return IntegrationFailure(os.str(), e.t_index());
  };

  // Atoms driven by a known field (no field update across the slab).
  const auto driven = [&](const FieldState& fields) {
    const StageFields table = make_stage_fields(fields.omega_a, fields.omega_b, m);
    try {
      auto hist = sweep_slab(model, axis, m, [&](int j, const Source&) {
        return FieldPair{table.a[j], table.b[j]};
      });
      hist.fields = fields;
      return hist;
    } catch (const IntegrationFailure& e) {
      throw with_z(e, fields.z);
    }
  };

  const auto coupled = [&](const SlabHistory<Source>& prev, double z_next) {
    std::array<std::vector<cplx>, kUp> up;
    for (auto& u : up) u.resize(axis.size());
    for (std::size_t i = 0; i < axis.size(); ++i) {
      const auto v = model.upstream(prev.fields.omega_a[i], prev.fields.omega_b[i],
                                    prev.sources[i], dz);
      for (int c = 0; c < kUp; ++c) up[c][i] = v[c];
    }
    std::array<std::vector<cplx>, kUp> table;
    for (int c = 0; c < kUp; ++c) table[c] = make_stage_table(up[c], m);
    try {
      auto hist = sweep_slab(model, axis, m, [&](int j, const Source& src) {
        std::array<cplx, kUp> v;
        for (int c = 0; c < kUp; ++c) v[c] = table[c][j];
        return model.closure(v, src, dz);
      });
      hist.fields.z = z_next;
      return hist;
    } catch (const IntegrationFailure& e) {
      throw with_z(e, z_next);
    }
  };

  PropagationResult result;
  SlabHistory<Source> here;
  here.fields = input;
  here.fields.z = grid.z_min;
  if (needs_atoms(0)) here = driven(here.fields);

  const auto record = [&](const SlabHistory<Source>& h, int k, const FluxResidual& res) {
    const AreaReport areas = measured_areas(h.fields, axis);
    result.steps.push_back({h.fields.z, areas.theta_a, areas.theta_b, res.per_step_max,
                            res.per_step_l2});
    if (wanted[k]) result.snapshots.push_back({h.fields, h.rho33()});
  };
  record(here, 0, {});

  const cplx rot_a = model.rotation_a(dz);
  const cplx rot_b = model.rotation_b(dz);
  for (int k = 0; k < grid.n_z; ++k) {
    const double z_next = grid.z_at(k + 1);
    SlabHistory<Source> next;
    FluxResidual res;
    if (step_occupied(k)) {
      next = coupled(here, z_next);
      double peak = 0.0, change = 0.0;
      for (std::size_t i = 0; i < axis.size(); ++i) {
        peak = std::max({peak, std::abs(here.fields.omega_a[i]), std::abs(here.fields.omega_b[i])});
        change = std::max({change, std::abs(next.fields.omega_a[i] - rot_a * here.fields.omega_a[i]),
                           std::abs(next.fields.omega_b[i] - rot_b * here.fields.omega_b[i])});
      }
      if (change > 0.5 * peak && change > 0.0) {
        std::ostringstream os;
        os << "Z step " << dz << " does not resolve the field evolution at Z = "
           << here.fields.z << ": change " << change << " against peak field " << peak
           << "; reduce dz";
        throw ResolutionError(os.str(), here.fields.z);
      }
      res = flux_residual_step(here.fields, next.fields, here.rho33(), next.rho33(), model.mu(),
                               axis);
    } else {
      FieldState moved = here.fields;
      moved.z = z_next;
      if (needs_atoms(k + 1)) {
        next = driven(moved);
      } else {
        next.fields = std::move(moved);
      }
    }
    record(next, k + 1, res);
    here = std::move(next);
  }
  return result;
}

}  // namespace twopulse
