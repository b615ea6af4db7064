#pragma once

// Initial data and parameters shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>

#include "multifluid/euler_solver.hpp"
#include "multifluid/lagrange_solver.hpp"

namespace multifluid::testing {

inline constexpr double pi = std::numbers::pi;

inline Physics scenario_r_physics() {
  Eigen::Matrix2d m;
  m << 2.0, 1.0, 1.0, 2.0;
  return Physics(FluidParams(2, 1.0, 1.4), ViscosityMatrix(m));
}

/// rho_1 = 0.6 + 0.2 sin(2 pi x), rho_2 = 0.8 - 0.2 sin(2 pi x),
/// u_i = 0.1 sin(pi x) (-1)^i.
inline EulerState scenario_r_state(int n_cells) {
  const Grid grid(n_cells, 1.0);
  const Field x = grid.nodes();
  ComponentFields rho(grid.n_nodes(), 2);
  ComponentFields u(grid.n_nodes(), 2);
  for (Eigen::Index k = 0; k < grid.n_nodes(); ++k) {
    const double s = std::sin(2.0 * pi * x[k]);
    rho(k, 0) = 0.6 + 0.2 * s;
    rho(k, 1) = 0.8 - 0.2 * s;
    u(k, 0) = -0.1 * std::sin(pi * x[k]);
    u(k, 1) = 0.1 * std::sin(pi * x[k]);
  }
  return make_euler_state(grid, rho, u);
}

/// Step size 0.4 h, snapshots every step unless told otherwise.
inline TimeControl scenario_r_control(int n_cells, double final_time = 1.0, int stride = 1) {
  TimeControl control;
  control.final_time = final_time;
  control.cfl = 0.5;
  control.dt_max = 0.4 / n_cells;
  control.snapshot_stride = stride;
  return control;
}

inline EulerState uniform_state(int n_cells, const Eigen::RowVectorXd& densities) {
  const Grid grid(n_cells, 1.0);
  ComponentFields rho = densities.replicate(grid.n_nodes(), 1);
  ComponentFields u = ComponentFields::Zero(grid.n_nodes(), densities.size());
  return make_euler_state(grid, rho, u);
}

/// Discrete L2 norm of every column stacked.
inline double l2_norm(const Grid& grid, const Eigen::MatrixXd& f) {
  return std::sqrt(integrate_columns(grid, f.cwiseAbs2()).sum());
}

/// Fine-grid values at the nodes of the grid with half as many cells.
inline Eigen::MatrixXd inject(const Eigen::MatrixXd& fine) {
  Eigen::MatrixXd coarse((fine.rows() - 1) / 2 + 1, fine.cols());
  for (Eigen::Index k = 0; k < coarse.rows(); ++k) coarse.row(k) = fine.row(2 * k);
  return coarse;
}

}  // namespace multifluid::testing
