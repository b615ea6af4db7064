#pragma once

// A smooth exact solution of the forced Eulerian system, for convergence
// studies. The concentrations are uniform, so every continuity equation
// reduces to the one for the total density
//   rho = rho_bar + eps a(t) P'(x),   a(t) = sin(2 pi t),
// and the average velocity is fixed by it:
//   v = -eps a'(t) P(x) / rho.
// Each constituent carries an extra mode b_i(t) q(x) with sum_i b_i = 0,
// b_i = w_i b cos(pi t), so that mean(u) = v. The forcing is the residual
//   f_i = rho_i (d_t u_i + v d_x u_i) + K d_x rho^gamma - sum_j mu_ij d_xx u_j.
// With both amplitudes zero the solution is the resting uniform state and
// the forcing vanishes identically.

#include <Eigen/Dense>

#include "multifluid/euler_solver.hpp"

namespace multifluid {

/// Spatial shapes of the manufactured fields. `trigonometric` uses
/// P = sin(pi x)/pi and q = sin(pi x); `polynomial` uses P = x(1-x) and
/// q = 4x(1-x), on which the central stencils are exact.
enum class ManufacturedProfile { trigonometric, polynomial };

struct ManufacturedParams {
  /// rho_i / rho, positive and summing to 1.
  Eigen::RowVectorXd concentrations;
  double base_density = 1.0;
  double density_amplitude = 0.2;
  double velocity_amplitude = 0.1;
  ManufacturedProfile profile = ManufacturedProfile::trigonometric;
};

class ManufacturedSolution {
 public:
  /// Throws ValidationError on concentrations that do not match the physics
  /// or do not form a partition of unity, or on a density that can vanish.
  ManufacturedSolution(Physics physics, ManufacturedParams params);

  const Physics& physics() const { return physics_; }
  const ManufacturedParams& params() const { return params_; }

  ComponentFields density(const Grid& grid, double t) const;
  ComponentFields velocity(const Grid& grid, double t) const;
  ComponentFields forcing(const Grid& grid, double t) const;

  EulerState state(const Grid& grid, double t) const;
  SourceTerms sources() const;

 private:
  Physics physics_;
  ManufacturedParams params_;
  /// Zero-sum weights w_i of the relative modes.
  Eigen::RowVectorXd weights_;
};

struct ManufacturedError {
  int n_cells = 0;
  /// L2 error of all densities and of all velocities at the final time.
  double density = 0.0;
  double velocity = 0.0;
  bool aborted = false;
};

/// Runs the forced Eulerian solver from the exact initial state and compares
/// with the exact solution at control.final_time. dt_max is taken per unit h:
/// the step size bound is dt_max_per_h * h.
ManufacturedError manufactured_error(const ManufacturedSolution& solution, int n_cells, double final_time,
                                     double cfl, double dt_max_per_h);

}  // namespace multifluid
