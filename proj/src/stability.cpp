#include "multifluid/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "multifluid/diagnostics.hpp"
#include "multifluid/euler_solver.hpp"

namespace multifluid {

EulerState perturbation_direction(const Grid& grid, int n_components) {
  EulerState d{0.0, grid, ComponentFields(grid.n_nodes(), n_components), ComponentFields(grid.n_nodes(), n_components)};
  for (Eigen::Index k = 0; k < grid.n_nodes(); ++k) {
    const double x = grid.node(k);
    d.rho.row(k).setConstant(std::cos(std::numbers::pi * x));
    d.u.row(k).setConstant(std::sin(std::numbers::pi * x));
  }
  d.u.row(0).setZero();
  d.u.row(grid.n_cells()).setZero();
  EulerState zero{0.0, grid, ComponentFields::Zero(grid.n_nodes(), n_components),
                  ComponentFields::Zero(grid.n_nodes(), n_components)};
  const double norm = l2_distance(d, zero);
  d.rho /= norm;
  d.u /= norm;
  return d;
}

StabilityGap stability_gap(const Physics& physics, const EulerTrajectory& base, const TimeControl& control,
                           double delta) {
  StabilityGap result;
  result.delta = delta;
  result.aborted = base.aborted;
  if (delta == 0.0) return result;

  const EulerState& initial = base.snapshots.front();
  const EulerState direction = perturbation_direction(initial.grid, initial.n_components());
  const EulerState perturbed = make_euler_state(initial.grid, initial.rho + delta * direction.rho,
                                                initial.u + delta * direction.u, initial.time);

  TimeControl replay = control;
  replay.dt_schedule = base.step_sizes();
  replay.snapshot_stride = base.snapshot_stride;
  const EulerTrajectory other = simulate(physics, perturbed, replay);
  result.aborted = result.aborted || other.aborted;

  const std::size_t count = std::min(base.snapshots.size(), other.snapshots.size());
  for (std::size_t k = 0; k < count; ++k) {
    result.gap = std::max(result.gap, l2_distance(base.snapshots[k], other.snapshots[k]));
  }
  result.gap = std::max(result.gap, l2_distance(base.final_state, other.final_state));
  result.ratio = result.gap / delta;
  return result;
}

StabilityGap stability_gap(const Physics& physics, const EulerState& initial, const TimeControl& control,
                           double delta) {
  if (delta == 0.0) return StabilityGap{};
  return stability_gap(physics, simulate(physics, initial, control), control, delta);
}

}  // namespace multifluid
