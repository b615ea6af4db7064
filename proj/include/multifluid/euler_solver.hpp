#pragma once

// Eulerian time stepping: explicit conservative upwind transport of the
// densities by the average velocity, explicit advection and pressure gradient
// for the velocities, then one implicit viscous solve coupling all
// constituents through M (block tridiagonal, N x N blocks).

#include "multifluid/state.hpp"

namespace multifluid {

/// Densities after one explicit conservative upwind step with v = mean(u).
/// Throws TimestepRejected if any density would become nonpositive.
ComponentFields continuity_step(const EulerState& s, double dt);

/// Velocities at the new time level. `s` must already carry the advanced
/// densities and the old velocities; `forcing` is empty or one column per
/// constituent. Solves
///   rho_i (u_i - u_i*) / dt = sum_j mu_ij d_xx u_j
/// with u_i* the upwind-advected velocity minus dt (K d_x rho^gamma - f_i) / rho_i
/// and u = 0 at both ends.
ComponentFields viscous_momentum_solve(const EulerState& s, double dt, const Physics& physics,
                                       const ComponentFields& forcing = {});

/// dt = cfl * h / max(|v|, 1e-12), capped at dt_max.
double cfl_dt(const EulerState& s, double cfl, double dt_max);

EulerState step(const EulerState& s, double dt, const Physics& physics, const SourceTerms& sources = {});

/// Advances to control.final_time. A rejected step is retried with half the
/// step size; below dt_min the run stops and the trajectory is flagged aborted.
EulerTrajectory simulate(const Physics& physics, const EulerState& initial, const TimeControl& control,
                         const SourceTerms& sources = {});

}  // namespace multifluid
