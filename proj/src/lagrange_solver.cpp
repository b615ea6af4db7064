#include "multifluid/lagrange_solver.hpp"

#include <algorithm>
#include <cmath>

#include "multifluid/block_tridiagonal.hpp"
#include "time_driver.hpp"

namespace multifluid {

Field density_update(const LagrangeState& s, double dt) {
  const Field v = average_velocity(s.u);
  const Field divergence = conservative_divergence(s.grid, v);
  // one factor for all constituents, so rho_i / rho cannot move
  return (s.rho.array() * (-dt * s.rho.array() * divergence.array()).exp()).matrix();
}

ComponentFields momentum_solve_lagrange(const LagrangeState& s, double dt, const Physics& physics) {
  const Grid& grid = s.grid;
  const Eigen::Index n = grid.n_cells();
  const Eigen::Index components = s.n_components();
  const Field pressure_gradient = ddx(grid, pressure_field(s.rho, physics.params()));
  const double ratio = dt / (grid.spacing() * grid.spacing());
  const Eigen::MatrixXd& mu = physics.viscosity().entries();

  BlockTridiagonal system(n - 1, components);
  Eigen::MatrixXd rhs(n - 1, components);
  for (Eigen::Index k = 1; k < n; ++k) {
    const Eigen::Index row = k - 1;
    const double rho_left = 0.5 * (s.rho[k - 1] + s.rho[k]);
    const double rho_right = 0.5 * (s.rho[k] + s.rho[k + 1]);
    system.lower[row] = -ratio * rho_left * mu;
    system.upper[row] = -ratio * rho_right * mu;
    system.diagonal[row] = ratio * (rho_left + rho_right) * mu;
    system.diagonal[row].diagonal() += s.concentration.row(k).transpose();
    rhs.row(row) = s.concentration.row(k).cwiseProduct(s.u.row(k)).array() - dt * pressure_gradient[k];
  }

  ComponentFields u = ComponentFields::Zero(grid.n_nodes(), components);
  u.middleRows(1, n - 1) = solve_block_thomas(system, rhs);
  return u;
}

double cfl_dt(const LagrangeState& s, double cfl, double dt_max) {
  const double vmax = Field(average_velocity(s.u)).cwiseAbs().maxCoeff();
  const double cell_width = s.grid.spacing() / s.rho.maxCoeff();
  return std::min(dt_max, cfl * cell_width / std::max(vmax, 1e-12));
}

LagrangeState step_lagrange(const LagrangeState& s, double dt, const Physics& physics) {
  LagrangeState next = s;
  next.rho = density_update(s, dt);
  // The exponential leaves sum w/rho off by O(dt^2) per step. One shared factor
  // restores the Eulerian length and leaves the concentrations alone.
  const Field w = s.grid.weights();
  next.rho *= w.cwiseQuotient(next.rho).sum() / w.cwiseQuotient(s.rho).sum();
  next.time = s.time + dt;
  next.u = momentum_solve_lagrange(next, dt, physics);
  return next;
}

LagrangeTrajectory simulate_lagrange(const Physics& physics, const LagrangeState& initial,
                                     const TimeControl& control) {
  return detail::run_time_loop(
      physics, initial, control, [&](const LagrangeState& s, double dt) { return step_lagrange(s, dt, physics); },
      [&](const LagrangeState& s) { return cfl_dt(s, control.cfl, control.dt_max); });
}

}  // namespace multifluid
