#include "multifluid/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace multifluid {

namespace {

constexpr double pi = std::numbers::pi;

/// Mass-flux shape P (zero at both ends) and its first three derivatives,
/// and the relative velocity mode q (zero at both ends) with two derivatives.
struct Shapes {
  double P, P1, P2, P3;
  double q, q1, q2;
};

Shapes shapes(ManufacturedProfile profile, double x) {
  if (profile == ManufacturedProfile::polynomial) {
    return {x * (1.0 - x), 1.0 - 2.0 * x, -2.0, 0.0, 4.0 * x * (1.0 - x), 4.0 - 8.0 * x, -8.0};
  }
  const double s = std::sin(pi * x);
  const double c = std::cos(pi * x);
  return {s / pi, c, -pi * s, -pi * pi * c, s, pi * c, -pi * pi * s};
}

/// Pointwise values of the exact fields and the derivatives the residual needs.
struct Pointwise {
  Shapes shape;
  double rho, rho_x;
  double v, v_t, v_x, v_xx;
};

Pointwise evaluate(const ManufacturedParams& p, double x, double t) {
  const double eps = p.density_amplitude;
  const double a = std::sin(2.0 * pi * t);
  const double da = 2.0 * pi * std::cos(2.0 * pi * t);
  const double dda = -4.0 * pi * pi * a;
  const Shapes sh = shapes(p.profile, x);

  const double rho = p.base_density + eps * a * sh.P1;
  const double rho_x = eps * a * sh.P2;
  const double rho_xx = eps * a * sh.P3;
  const double rho_t = eps * da * sh.P1;

  // v = g / rho with g = rho v = -eps a' P(x)
  const double g = -eps * da * sh.P;
  const double g_x = -eps * da * sh.P1;
  const double g_xx = -eps * da * sh.P2;
  const double g_t = -eps * dda * sh.P;

  Pointwise out{};
  out.shape = sh;
  out.rho = rho;
  out.rho_x = rho_x;
  out.v = g / rho;
  out.v_t = (g_t * rho - g * rho_t) / (rho * rho);
  out.v_x = (g_x * rho - g * rho_x) / (rho * rho);
  out.v_xx = g_xx / rho - 2.0 * g_x * rho_x / (rho * rho) - g * rho_xx / (rho * rho) +
             2.0 * g * rho_x * rho_x / (rho * rho * rho);
  return out;
}

}  // namespace

ManufacturedSolution::ManufacturedSolution(Physics physics, ManufacturedParams params)
    : physics_(std::move(physics)), params_(std::move(params)) {
  const int n = physics_.n_components();
  if (params_.concentrations.size() != n) {
    throw ValidationError("mms.concentrations", "expected one concentration per constituent");
  }
  if (!(params_.concentrations.array() > 0.0).all() || std::abs(params_.concentrations.sum() - 1.0) > 1e-12) {
    throw ValidationError("mms.concentrations", "concentrations must be positive and sum to 1");
  }
  if (!(params_.base_density > std::abs(params_.density_amplitude))) {
    throw ValidationError("mms.density_amplitude", "amplitude must stay below the base density");
  }
  if (!std::isfinite(params_.velocity_amplitude)) {
    throw ValidationError("mms.velocity_amplitude", "must be finite");
  }
  // Alternating signs, the last one absorbing the remainder: sums to zero for every N.
  weights_ = Eigen::RowVectorXd::Zero(n);
  for (int i = 0; i + 1 < n; ++i) weights_[i] = (i % 2 == 0) ? 1.0 : -1.0;
  if (n > 1) weights_[n - 1] = -weights_.head(n - 1).sum();
}

ComponentFields ManufacturedSolution::density(const Grid& grid, double t) const {
  ComponentFields out(grid.n_nodes(), physics_.n_components());
  for (Eigen::Index k = 0; k < grid.n_nodes(); ++k) {
    out.row(k) = evaluate(params_, grid.node(k), t).rho * params_.concentrations;
  }
  return out;
}

ComponentFields ManufacturedSolution::velocity(const Grid& grid, double t) const {
  const double b = params_.velocity_amplitude * std::cos(pi * t);
  ComponentFields out(grid.n_nodes(), physics_.n_components());
  for (Eigen::Index k = 0; k < grid.n_nodes(); ++k) {
    const double x = grid.node(k);
    const Pointwise p = evaluate(params_, x, t);
    out.row(k) = Eigen::RowVectorXd::Constant(weights_.size(), p.v) + b * p.shape.q * weights_;
  }
  return out;
}

ComponentFields ManufacturedSolution::forcing(const Grid& grid, double t) const {
  const auto& fp = physics_.params();
  const Eigen::MatrixXd& mu = physics_.viscosity().entries();
  const double b = params_.velocity_amplitude * std::cos(pi * t);
  const double b_t = -params_.velocity_amplitude * pi * std::sin(pi * t);

  ComponentFields out(grid.n_nodes(), physics_.n_components());
  for (Eigen::Index k = 0; k < grid.n_nodes(); ++k) {
    const double x = grid.node(k);
    const Pointwise p = evaluate(params_, x, t);
    const Shapes& sh = p.shape;
    const Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(weights_.size());

    const Eigen::RowVectorXd u_t = p.v_t * ones + b_t * sh.q * weights_;
    const Eigen::RowVectorXd u_x = p.v_x * ones + b * sh.q1 * weights_;
    const Eigen::RowVectorXd u_xx = p.v_xx * ones + b * sh.q2 * weights_;
    const double pressure_x =
        fp.pressure_const() * fp.polytropic_index() * std::pow(p.rho, fp.polytropic_index() - 1.0) * p.rho_x;

    const Eigen::RowVectorXd rho_i = p.rho * params_.concentrations;
    out.row(k) = rho_i.cwiseProduct(u_t + p.v * u_x) + pressure_x * ones - u_xx * mu;
  }
  return out;
}

EulerState ManufacturedSolution::state(const Grid& grid, double t) const {
  return make_euler_state(grid, density(grid, t), velocity(grid, t), t);
}

SourceTerms ManufacturedSolution::sources() const {
  return [copy = *this](const Grid& grid, double t) { return copy.forcing(grid, t); };
}

ManufacturedError manufactured_error(const ManufacturedSolution& solution, int n_cells, double final_time,
                                     double cfl, double dt_max_per_h) {
  const Grid grid(n_cells, 1.0);
  TimeControl control;
  control.final_time = final_time;
  control.cfl = cfl;
  control.dt_max = dt_max_per_h * grid.spacing();
  control.snapshot_stride = 1 << 30;

  const EulerTrajectory run = simulate(solution.physics(), solution.state(grid, 0.0), control, solution.sources());
  const EulerState exact = solution.state(grid, run.final_state.time);

  ManufacturedError error;
  error.n_cells = n_cells;
  error.aborted = run.aborted;
  error.density = std::sqrt(integrate_columns(grid, (run.final_state.rho - exact.rho).cwiseAbs2()).sum());
  error.velocity = std::sqrt(integrate_columns(grid, (run.final_state.u - exact.u).cwiseAbs2()).sum());
  return error;
}

}  // namespace multifluid
