#pragma once

// Continuous dependence on the initial data, measured directly: two runs whose
// initial states differ by delta in L2 are advanced on one time grid and the
// largest distance between them is reported relative to delta.

#include "multifluid/state.hpp"

namespace multifluid {

struct StabilityGap {
  double delta = 0.0;
  /// sup_t of the L2 distance over all densities and velocities.
  double gap = 0.0;
  /// gap / delta; 0 when delta is 0.
  double ratio = 0.0;
  bool aborted = false;
};

/// Fixed unit-norm perturbation direction: cos(pi x) shapes on the densities,
/// sin(pi x) on the velocities (vanishing at both ends), scaled to unit
/// discrete L2 norm over the stacked fields.
EulerState perturbation_direction(const Grid& grid, int n_components);

/// The base run uses `control` as given; the perturbed run replays its step
/// sizes. Every snapshot is compared, so the step count bounds the cost.
StabilityGap stability_gap(const Physics& physics, const EulerState& initial, const TimeControl& control,
                           double delta);

/// Base trajectory computed once and shared by several perturbation sizes.
StabilityGap stability_gap(const Physics& physics, const EulerTrajectory& base, const TimeControl& control,
                           double delta);

}  // namespace multifluid
