#pragma once

// Time stepping in mass coordinates y = int_0^x rho on [0, d], and the
// transforms between the Eulerian and the Lagrangian description.

#include "multifluid/state.hpp"

namespace multifluid {

/// d = int_0^1 sum_i rho_0i dx (trapezoid rule).
double total_mass_coordinate(const Grid& grid, const ComponentFields& rho0);

/// Resamples an Eulerian state onto the uniform mass grid with the same number
/// of cells. Densities are remapped conservatively over dual cells (component
/// masses and the unit volume are kept exactly). Cumulative masses and
/// velocities go through a monotone piecewise cubic, so the remap error does
/// not stall at the square of the particle displacement.
LagrangeState to_lagrangian(const EulerState& s);

/// Inverse transform with x(y) = int_0^y dy'/rho. Throws MassConsistencyError
/// when x(d) misses 1 by more than `volume_tolerance`.
EulerState to_eulerian(const LagrangeState& s, double volume_tolerance = 1e-6);

/// Total density after rho <- rho exp(-dt rho d_y v), with d_y v the
/// dual-cell divergence at the old time level. The concentrations are untouched.
Field density_update(const LagrangeState& s, double dt);

/// Velocities at the new level from
///   (rho_i/rho)(u_i - u_i^n)/dt + K d_y rho^gamma = sum_j mu_ij d_y(rho d_y u_j),
/// viscous term implicit with face-averaged rho; `s` carries the advanced density.
ComponentFields momentum_solve_lagrange(const LagrangeState& s, double dt, const Physics& physics);

/// Same rule as the Eulerian step, using the local Eulerian cell width h_y / rho.
double cfl_dt(const LagrangeState& s, double cfl, double dt_max);

/// density_update, rescaled so that int dy/rho keeps its value, then
/// momentum_solve_lagrange.
LagrangeState step_lagrange(const LagrangeState& s, double dt, const Physics& physics);

LagrangeTrajectory simulate_lagrange(const Physics& physics, const LagrangeState& initial, const TimeControl& control);

}  // namespace multifluid
