#include "multifluid/euler_solver.hpp"

#include <algorithm>
#include <cmath>

#include "multifluid/block_tridiagonal.hpp"
#include "time_driver.hpp"

namespace multifluid {

ComponentFields continuity_step(const EulerState& s, double dt) {
  const Field v = average_velocity(s.u);
  ComponentFields next = s.rho - dt * upwind_flux_divergence(s.grid, s.rho, v);
  if (!(next.array() > 0.0).all()) throw TimestepRejected("continuity step produced a nonpositive density");
  return next;
}

ComponentFields viscous_momentum_solve(const EulerState& s, double dt, const Physics& physics,
                                       const ComponentFields& forcing) {
  const Grid& grid = s.grid;
  const Eigen::Index n = grid.n_cells();
  const Eigen::Index components = s.n_components();
  if (forcing.size() != 0 && (forcing.rows() != grid.n_nodes() || forcing.cols() != components)) {
    throw ShapeError("forcing does not match the state layout");
  }

  const Field v = average_velocity(s.u);
  const ComponentFields advected = s.u - dt * (upwind_advect(grid, s.u, v).array().colwise() * v.array()).matrix();
  const Field pressure_gradient = ddx(grid, pressure_field(Field(s.rho.rowwise().sum()), physics.params()));

  // u* of the splitting, before the implicit viscous stage
  ComponentFields explicit_part = advected;
  for (Eigen::Index i = 0; i < components; ++i) {
    Field accel = pressure_gradient;
    if (forcing.size() != 0) accel -= forcing.col(i);
    explicit_part.col(i) -= dt * (accel.array() / s.rho.col(i).array()).matrix();
  }

  const double ratio = dt / (grid.spacing() * grid.spacing());
  const Eigen::MatrixXd& mu = physics.viscosity().entries();
  BlockTridiagonal system(n - 1, components);
  Eigen::MatrixXd rhs(n - 1, components);
  for (Eigen::Index k = 1; k < n; ++k) {
    const Eigen::Index row = k - 1;
    system.lower[row] = -ratio * mu;
    system.upper[row] = -ratio * mu;
    system.diagonal[row] = 2.0 * ratio * mu;
    system.diagonal[row].diagonal() += s.rho.row(k).transpose();
    rhs.row(row) = s.rho.row(k).cwiseProduct(explicit_part.row(k));
  }

  ComponentFields u = ComponentFields::Zero(grid.n_nodes(), components);
  u.middleRows(1, n - 1) = solve_block_thomas(system, rhs);
  return u;
}

double cfl_dt(const EulerState& s, double cfl, double dt_max) {
  const double vmax = Field(average_velocity(s.u)).cwiseAbs().maxCoeff();
  return std::min(dt_max, cfl * s.grid.spacing() / std::max(vmax, 1e-12));
}

EulerState step(const EulerState& s, double dt, const Physics& physics, const SourceTerms& sources) {
  EulerState next = s;
  next.rho = continuity_step(s, dt);
  next.time = s.time + dt;
  const ComponentFields forcing = sources ? sources(s.grid, next.time) : ComponentFields();
  next.u = viscous_momentum_solve(next, dt, physics, forcing);
  return next;
}


EulerTrajectory simulate(const Physics& physics, const EulerState& initial, const TimeControl& control,
                         const SourceTerms& sources) {
  return detail::run_time_loop(
      physics, initial, control, [&](const EulerState& s, double dt) { return step(s, dt, physics, sources); },
      [&](const EulerState& s) { return cfl_dt(s, control.cfl, control.dt_max); });
}

}  // namespace multifluid
