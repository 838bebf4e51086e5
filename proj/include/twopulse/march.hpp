#pragma once

// Explicit-midpoint Z march shared by the full and the adiabatic models, so
// that differences between the two come from the physics, not the stepping.
//
// A Model provides
//   Response respond(const FieldState&) const;   // medium answer, has .rho33
//   void advance(const FieldState& from, double dz, const Response&,
//                FieldState& to) const;          // field update over dz
//   void check(const FieldState&, const Response&, double dz) const;
//   double mu() const;

#include "twopulse/diagnostics.hpp"
#include "twopulse/domain.hpp"
#include "twopulse/errors.hpp"
#include "twopulse/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

namespace twopulse {

namespace detail {

inline std::vector<bool> station_flags(const SimulationGrid& grid,
                                       const PropagationSettings& settings) {
  const auto stations = settings.stations.empty()
                            ? even_stations(grid.z_min, grid.z_max, 6)
                            : settings.stations;
  std::vector<bool> wanted(grid.n_z + 1, false);
  for (double z : stations) {
    const long k = std::lround((z - grid.z_min) / grid.dz());
    wanted[std::clamp<long>(k, 0, grid.n_z)] = true;
  }
  return wanted;
}

template <class Model>
auto respond_at(const Model& model, const FieldState& fields) {
  try {
    return model.respond(fields);
  } catch (const IntegrationFailure& e) {
    std::ostringstream os;
    os << e.what() << " at Z = " << fields.z;
    throw IntegrationFailure(os.str(), e.t_index());
  }
}

}  // namespace detail

template <class Model>
PropagationResult march(const FieldState& input, const SimulationGrid& grid,
                        const MediumMask& mask, const PropagationSettings& settings,
                        const Model& model) {
  if (const auto v = violations(grid); !v.empty()) throw InvalidParameter(v.front());
  if (input.omega_a.size() != grid.t.size() || input.omega_b.size() != grid.t.size())
    throw InvalidParameter("entry fields must be sampled on the time axis");

  const double dz = grid.dz();
  const auto wanted = detail::station_flags(grid, settings);
  const auto step_occupied = [&](int k) { return mask.occupied(grid.z_at(k) + 0.5 * dz); };
  const auto needs_atoms = [&](int k) {
    return (k < grid.n_z && step_occupied(k)) || (k > 0 && step_occupied(k - 1));
  };
  const std::vector<double> no_atoms(grid.t.size(), 0.0);

  using Response = decltype(model.respond(input));
  PropagationResult result;
  FieldState here = input;
  here.z = grid.z_min;
  std::optional<Response> r_here;
  if (needs_atoms(0)) r_here = detail::respond_at(model, here);

  const auto record = [&](const FieldState& f, const std::optional<Response>& r, int k,
                          const FluxResidual& res) {
    const AreaReport areas = measured_areas(f, grid.t);
    result.steps.push_back({f.z, areas.theta_a, areas.theta_b, res.per_step_max, res.per_step_l2});
    if (wanted[k]) result.snapshots.push_back({f, r ? r->rho33 : no_atoms});
  };
  record(here, r_here, 0, {});

  for (int k = 0; k < grid.n_z; ++k) {
    FieldState next;
    const bool occupied = step_occupied(k);
    if (occupied) {
      model.check(here, *r_here, dz);
      FieldState half;
      model.advance(here, 0.5 * dz, *r_here, half);
      half.z = here.z + 0.5 * dz;
      const auto r_half = detail::respond_at(model, half);
      model.advance(here, dz, r_half, next);
    } else {
      next = here;
    }
    next.z = grid.z_at(k + 1);

    std::optional<Response> r_next;
    if (needs_atoms(k + 1)) r_next = detail::respond_at(model, next);

    FluxResidual res;
    if (occupied)
      res = flux_residual_step(here, next, r_here->rho33, r_next->rho33, model.mu(), grid.t);
    record(next, r_next, k + 1, res);
    here = std::move(next);
    r_here = std::move(r_next);
  }
  return result;
}

}  // namespace twopulse
