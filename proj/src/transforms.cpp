#include <cmath>
#include <vector>

#include <math.h>  // pchip.hpp calls isnan unqualified

#include <boost/math/interpolators/pchip.hpp>

#include "multifluid/lagrange_solver.hpp"

namespace multifluid {

namespace {

/// Edges of the dual cells of `grid`: 0, x_k + h/2 for k < n, L.
Field dual_edges(const Grid& grid) {
  Field edges(grid.n_nodes() + 1);
  edges[0] = 0.0;
  for (Eigen::Index k = 0; k < grid.n_cells(); ++k) edges[k + 1] = grid.node(k) + 0.5 * grid.spacing();
  edges[grid.n_nodes()] = grid.length();
  return edges;
}

/// Running sum of cell amounts placed at the dual edges (first entry 0).
Eigen::MatrixXd cumulative_at_edges(const Eigen::MatrixXd& amounts) {
  Eigen::MatrixXd out(amounts.rows() + 1, amounts.cols());
  out.row(0).setZero();
  for (Eigen::Index k = 0; k < amounts.rows(); ++k) out.row(k + 1) = out.row(k) + amounts.row(k);
  return out;
}

/// Monotone piecewise-cubic interpolation, column by column, clamped outside
/// [at(0), at(end)]. Linear interpolation between nodes displaced by a fraction
/// theta of a cell errs by theta (1 - theta) h^2 f''/2, whose theta^2 h^2 part
/// does not shrink with h when the displacement is below one cell. The cubic
/// keeps cumulative masses increasing and pushes that error to higher order.
Eigen::MatrixXd interpolate_cubic(const Field& at, const Eigen::MatrixXd& values, const Field& to) {
  using boost::math::interpolators::pchip;
  Eigen::MatrixXd out(to.size(), values.cols());
  const double lo = at[0];
  const double hi = at[at.size() - 1];
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    std::vector<double> x(at.data(), at.data() + at.size());
    std::vector<double> y(values.rows());
    for (Eigen::Index k = 0; k < values.rows(); ++k) y[k] = values(k, c);
    const pchip<std::vector<double>> spline(std::move(x), std::move(y));
    for (Eigen::Index k = 0; k < to.size(); ++k) {
      if (to[k] <= lo) {
        out(k, c) = values(0, c);
      } else if (to[k] >= hi) {
        out(k, c) = values(values.rows() - 1, c);
      } else {
        out(k, c) = spline(to[k]);
      }
    }
  }
  return out;
}

void require_monotone(const Field& f, const char* what) {
  for (Eigen::Index k = 1; k < f.size(); ++k) {
    if (!(f[k] > f[k - 1])) throw std::runtime_error(std::string(what) + " is not strictly increasing");
  }
}

}  // namespace

double total_mass_coordinate(const Grid& grid, const ComponentFields& rho0) {
  grid.check(rho0, "initial density");
  return integrate(grid, Field(rho0.rowwise().sum()));
}

LagrangeState to_lagrangian(const EulerState& s) {
  const Grid& grid = s.grid;
  const Field total = total_density(s);
  if (!(total.minCoeff() > 0.0)) throw DomainError("to_lagrangian: total density must be positive");

  // Densities are constant on dual cells, so the mass below each edge is a running sum.
  const Field weights = grid.weights();
  const Eigen::MatrixXd component_mass = cumulative_at_edges((s.rho.array().colwise() * weights.array()).matrix());
  const Field mass = component_mass.rowwise().sum();
  const Field x_edges = dual_edges(grid);
  require_monotone(mass, "cumulative mass y(x)");

  const double d = mass[mass.size() - 1];
  const Grid mass_grid(grid.n_cells(), d);
  const Field y_edges = dual_edges(mass_grid);
  const Field mass_weights = mass_grid.weights();

  // The cubic is not additive across components; rescale so the component
  // masses below each edge add up to y exactly and every component telescopes.
  Eigen::MatrixXd remapped_mass = interpolate_cubic(mass, component_mass, y_edges);
  for (Eigen::Index j = 1; j < remapped_mass.rows(); ++j) {
    remapped_mass.row(j) *= y_edges[j] / remapped_mass.row(j).sum();
  }
  const Field remapped_x = interpolate_cubic(mass, x_edges, y_edges);

  LagrangeState out{s.time, mass_grid, Field(mass_grid.n_nodes()),
                    ComponentFields(mass_grid.n_nodes(), s.n_components()), ComponentFields()};
  for (Eigen::Index j = 0; j < mass_grid.n_nodes(); ++j) {
    const Eigen::RowVectorXd cell_mass = remapped_mass.row(j + 1) - remapped_mass.row(j);
    const double volume = remapped_x[j + 1] - remapped_x[j];
    out.rho[j] = mass_weights[j] / volume;
    out.concentration.row(j) = cell_mass / cell_mass.sum();
  }

  const Field y_nodes = cumulative_integral(grid, total);
  out.u = interpolate_cubic(y_nodes, s.u, mass_grid.nodes());
  out.u.row(0).setZero();
  out.u.row(mass_grid.n_cells()).setZero();
  return out;
}

EulerState to_eulerian(const LagrangeState& s, double volume_tolerance) {
  const Grid& mass_grid = s.grid;
  if (!(s.rho.minCoeff() > 0.0)) throw DomainError("to_eulerian: density must be positive");

  const Field mass_weights = mass_grid.weights();
  Field x_edges = cumulative_at_edges((mass_weights.array() / s.rho.array()).matrix());
  const double volume = x_edges[x_edges.size() - 1];
  if (!(std::abs(volume - 1.0) <= volume_tolerance)) {
    throw MassConsistencyError("to_eulerian: int dy/rho = " + std::to_string(volume) + " differs from 1");
  }
  x_edges /= volume;
  require_monotone(x_edges, "x(y)");

  const Eigen::MatrixXd component_mass =
      cumulative_at_edges((s.concentration.array().colwise() * mass_weights.array()).matrix());
  const Field y_edges = dual_edges(mass_grid);

  const Grid grid(mass_grid.n_cells(), 1.0);
  const Field weights = grid.weights();
  const Eigen::MatrixXd remapped_mass = interpolate_cubic(x_edges, component_mass, dual_edges(grid));

  EulerState out{s.time, grid, ComponentFields(grid.n_nodes(), s.n_components()), ComponentFields()};
  for (Eigen::Index k = 0; k < grid.n_nodes(); ++k) {
    out.rho.row(k) = (remapped_mass.row(k + 1) - remapped_mass.row(k)) / weights[k];
  }

  const Field x_nodes = interpolate_cubic(y_edges, x_edges, mass_grid.nodes());
  out.u = interpolate_cubic(x_nodes, s.u, grid.nodes());
  out.u.row(0).setZero();
  out.u.row(grid.n_cells()).setZero();
  return out;
}

}  // namespace multifluid
