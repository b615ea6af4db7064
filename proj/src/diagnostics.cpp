#include "multifluid/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "multifluid/lagrange_solver.hpp"

namespace multifluid {

namespace {

std::string format(double value) {
  std::ostringstream out;
  out.precision(6);
  out << value;
  return out.str();
}

double potential_coefficient(const Physics& physics) {
  const auto& p = physics.params();
  return p.n_components() * p.pressure_const() / (p.polytropic_index() - 1.0);
}

/// Row-wise quadratic form sum_ij mu_ij a_i b_j.
Field quadratic_form(const Eigen::MatrixXd& a, const Eigen::MatrixXd& mu, const Eigen::MatrixXd& b) {
  return (a * mu).cwiseProduct(b).rowwise().sum();
}

template <typename State>
std::vector<const State*> all_states(const Trajectory<State>& trajectory) {
  std::vector<const State*> states;
  for (const auto& s : trajectory.snapshots) states.push_back(&s);
  if (states.empty() || states.back()->time != trajectory.final_state.time) states.push_back(&trajectory.final_state);
  return states;
}

InvariantEntry boundary_velocity(const std::vector<double>& end_values) {
  InvariantEntry entry{"boundary_velocity", 0.0, 0.0, false, false, ""};
  for (double v : end_values) entry.max_violation = std::max(entry.max_violation, std::abs(v));
  entry.passed = entry.max_violation == 0.0;
  entry.exact = entry.passed;
  entry.detail = "largest |u_i| at x=0 or x=1 over all snapshots";
  return entry;
}

InvariantEntry bounded_gradients(const std::vector<StepRecord>& records) {
  InvariantEntry entry{"bounded_gradients", 0.0, std::numeric_limits<double>::infinity(), true, false, ""};
  double sup_lograd = 0.0;
  double sup_beta = 0.0;
  for (const auto& r : records) {
    if (!std::isfinite(r.lograd_norm) || !std::isfinite(r.beta)) entry.passed = false;
    sup_lograd = std::max(sup_lograd, r.lograd_norm);
    sup_beta = std::max(sup_beta, r.beta);
  }
  entry.max_violation = entry.passed ? 0.0 : std::numeric_limits<double>::infinity();
  entry.detail = "sup lograd_norm " + format(sup_lograd) + ", sup beta " + format(sup_beta);
  return entry;
}

template <typename Fn>
void guarded(InvariantReport& report, const std::string& name, Fn&& fn) {
  try {
    report.entries.push_back(fn());
  } catch (const std::exception& e) {
    report.entries.push_back({name, std::numeric_limits<double>::infinity(), 0.0, false, false,
                              std::string("diagnostic error: ") + e.what()});
  }
}

}  // namespace

EnergyReport energy(const EulerState& s, const Physics& physics) {
  const Grid& grid = s.grid;
  const Field rho = total_density(s);
  EnergyReport report;
  report.kinetic = 0.5 * integrate_columns(grid, s.rho.cwiseProduct(s.u.cwiseAbs2()));
  report.potential = potential_coefficient(physics) *
                     integrate(grid, Field(rho.array().pow(physics.params().polytropic_index())));
  report.total = report.kinetic.sum() + report.potential;
  report.dissipation_rate = integrate_columns(grid, ddx(grid, s.u).cwiseAbs2()).sum();
  report.component_mass = integrate_columns(grid, s.rho);
  return report;
}

EnergyReport energy(const LagrangeState& s, const Physics& physics) {
  const Grid& grid = s.grid;
  EnergyReport report;
  report.kinetic = 0.5 * integrate_columns(grid, s.concentration.cwiseProduct(s.u.cwiseAbs2()));
  report.potential = potential_coefficient(physics) *
                     integrate(grid, Field(s.rho.array().pow(physics.params().polytropic_index() - 1.0)));
  report.total = report.kinetic.sum() + report.potential;
  const Eigen::MatrixXd gradient = ddx(grid, s.u);
  report.dissipation_rate =
      integrate_columns(grid, (gradient.cwiseAbs2().array().colwise() * s.rho.array()).matrix()).sum();
  report.component_mass = integrate_columns(grid, s.concentration);
  return report;
}

double lograd_norm(const LagrangeState& s) {
  return std::sqrt(integrate(s.grid, ddx(s.grid, Field(s.rho.array().log())).cwiseAbs2()));
}

double lograd_norm(const EulerState& s) {
  return std::sqrt(integrate(s.grid, ddx(s.grid, Field(total_density(s).array().log())).cwiseAbs2()));
}

double gradient_energy(const EulerState& s, const ViscosityMatrix& viscosity) {
  const Eigen::MatrixXd gradient = ddx(s.grid, s.u);
  return integrate(s.grid, quadratic_form(gradient, viscosity.entries(), gradient));
}

double gradient_energy(const LagrangeState& s, const ViscosityMatrix& viscosity) {
  const Eigen::MatrixXd gradient = ddx(s.grid, s.u);
  return integrate(s.grid,
                   Field(quadratic_form(gradient, viscosity.entries(), gradient).cwiseProduct(s.rho)));
}

double beta_increment(const EulerState& before, const EulerState& after, const ViscosityMatrix& viscosity) {
  const double dt = after.time - before.time;
  if (!(dt > 0.0)) return 0.0;
  const Eigen::MatrixXd rate = (after.u - before.u) / dt;
  const Eigen::MatrixXd viscous = d2dx2(after.grid, after.u) * viscosity.entries();
  const Eigen::MatrixXd integrand = after.rho.cwiseProduct(rate.cwiseAbs2()) + viscous.cwiseAbs2().cwiseQuotient(after.rho);
  return dt * integrate(after.grid, Field(integrand.rowwise().sum()));
}

double beta_increment(const LagrangeState& before, const LagrangeState& after, const ViscosityMatrix& viscosity) {
  const double dt = after.time - before.time;
  if (!(dt > 0.0)) return 0.0;
  const Grid& grid = after.grid;
  // rho_i dx = c_i dy; d_xx u = rho d_y(rho d_y u); (1/rho_i) dx = dy / (c_i rho^2)
  const Eigen::MatrixXd rate = (after.u - before.u) / dt;
  const Eigen::MatrixXd flux = ddx(grid, after.u).array().colwise() * after.rho.array();
  const Eigen::MatrixXd viscous = (ddx(grid, flux) * viscosity.entries()).array().colwise() * after.rho.array();
  const Eigen::MatrixXd scaled =
      viscous.cwiseAbs2().cwiseQuotient(after.concentration).array().colwise() / after.rho.array().square();
  const Eigen::MatrixXd integrand = after.concentration.cwiseProduct(rate.cwiseAbs2()) + scaled;
  return dt * integrate(grid, Field(integrand.rowwise().sum()));
}

template <typename State>
StepRecord StepRecorder<State>::record(const State& s, double dt) {
  const EnergyReport e = energy(s, *physics_);
  if (previous_) cumulative_ += beta_increment(*previous_, s, physics_->viscosity());
  StepRecord r;
  r.time = s.time;
  r.dt = dt;
  r.energy = e.total;
  r.dissipation_rate = e.dissipation_rate;
  r.component_mass = e.component_mass;
  if constexpr (std::is_same_v<State, EulerState>) {
    r.min_rho = s.rho.minCoeff();
    r.max_rho = s.rho.maxCoeff();
  } else {
    const ComponentFields rho = s.component_densities();
    r.min_rho = rho.minCoeff();
    r.max_rho = rho.maxCoeff();
  }
  r.lograd_norm = lograd_norm(s);
  r.beta = gradient_energy(s, physics_->viscosity()) + cumulative_;
  previous_ = s;
  return r;
}

template class StepRecorder<EulerState>;
template class StepRecorder<LagrangeState>;

bool InvariantReport::all_passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const InvariantEntry& e) { return e.passed; });
}

const InvariantEntry* InvariantReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

InvariantEntry concentration_bounds(const EulerTrajectory& trajectory, double tolerance) {
  const auto states = all_states(trajectory);
  const auto concentration = [](const EulerState& s) -> Eigen::MatrixXd {
    return s.rho.array().colwise() / total_density(s).array();
  };
  const Eigen::MatrixXd initial = concentration(*states.front());
  const Eigen::RowVectorXd lower = initial.colwise().minCoeff();
  const Eigen::RowVectorXd upper = initial.colwise().maxCoeff();

  InvariantEntry entry{"concentration_bounds", 0.0, tolerance, false, false, ""};
  for (const EulerState* s : states) {
    const Eigen::MatrixXd c = concentration(*s);
    const Eigen::MatrixXd above = (c.rowwise() - upper).cwiseMax(0.0);
    const Eigen::MatrixXd below = (-(c.rowwise() - lower)).cwiseMax(0.0);
    entry.max_violation = std::max({entry.max_violation, above.maxCoeff(), below.maxCoeff()});
  }
  entry.passed = entry.max_violation <= tolerance;
  entry.exact = entry.max_violation == 0.0;
  entry.detail = "inf/sup of the initial rho_i/rho bound rho_i/rho at every snapshot";
  return entry;
}

InvariantEntry concentration_bounds(const LagrangeTrajectory& trajectory) {
  const auto states = all_states(trajectory);
  const Eigen::MatrixXd& initial = states.front()->concentration;
  InvariantEntry entry{"concentration_exact", 0.0, 0.0, false, false, ""};
  for (const LagrangeState* s : states) {
    entry.max_violation = std::max(entry.max_violation, (s->concentration - initial).cwiseAbs().maxCoeff());
  }
  entry.passed = entry.max_violation == 0.0;
  entry.exact = entry.passed;
  entry.detail = entry.exact ? "rho_i/rho equal to the initial values bitwise" : "concentrations drifted";
  return entry;
}

InvariantEntry energy_monotonicity(const std::vector<StepRecord>& records, double spacing, double energy_coeff) {
  InvariantEntry entry{"energy_monotonicity", 0.0, 0.0, true, true, ""};
  double worst_ratio = 0.0;
  std::size_t worst_step = 0;
  for (std::size_t n = 1; n < records.size(); ++n) {
    const double rise = records[n].energy - records[n - 1].energy;
    const double tau = energy_coeff * records[n].dt * spacing;
    if (rise > 0.0) entry.exact = false;
    if (rise > tau) entry.passed = false;
    const double ratio = tau > 0.0 ? rise / tau : (rise > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (rise > 0.0 && ratio >= worst_ratio) {
      worst_ratio = ratio;
      worst_step = n;
      entry.max_violation = rise;
      entry.tolerance = tau;
    }
  }
  entry.detail = worst_step == 0 ? "energy never increased"
                                 : "largest relative rise at step " + std::to_string(worst_step) + " (rise/tau " +
                                       format(worst_ratio) + ")";
  return entry;
}

InvariantEntry dissipation_accounting(const std::vector<StepRecord>& records, double coercivity, double epsilon) {
  double dissipated = 0.0;
  for (std::size_t n = 1; n < records.size(); ++n) dissipated += records[n].dt * records[n].dissipation_rate;
  const double drop = records.front().energy - records.back().energy;
  const double required = (1.0 - epsilon) * coercivity * dissipated;
  InvariantEntry entry{"dissipation_accounting", std::max(0.0, required - drop), 0.0, drop >= required, false, ""};
  entry.detail = "E(0)-E(T) = " + format(drop) + ", (1-eps) C0 int D = " + format(required);
  return entry;
}

InvariantEntry mass_conservation(const std::vector<StepRecord>& records, double tolerance) {
  InvariantEntry entry{"mass_conservation", 0.0, tolerance, false, false, ""};
  const Eigen::RowVectorXd& initial = records.front().component_mass;
  for (const auto& r : records) {
    const Eigen::RowVectorXd drift = (r.component_mass - initial).cwiseAbs().cwiseQuotient(initial.cwiseAbs());
    entry.max_violation = std::max(entry.max_violation, drift.maxCoeff());
  }
  entry.passed = entry.max_violation <= tolerance;
  entry.exact = entry.max_violation == 0.0;
  entry.detail = "largest relative drift of a component mass";
  return entry;
}

InvariantEntry density_bounds(const std::vector<StepRecord>& records, double floor, double ceiling) {
  double lowest = std::numeric_limits<double>::infinity();
  double highest = -lowest;
  for (const auto& r : records) {
    lowest = std::min(lowest, r.min_rho);
    highest = std::max(highest, r.max_rho);
  }
  InvariantEntry entry{"density_bounds", std::max({0.0, floor - lowest, highest - ceiling}), 0.0, false, false, ""};
  entry.passed = lowest >= floor && highest <= ceiling;
  entry.detail = "min rho_i " + format(lowest) + ", max rho_i " + format(highest) + " (allowed [" + format(floor) +
                 ", " + format(ceiling) + "])";
  return entry;
}

namespace {

Field flux_potential(const EulerState& s, const Physics& physics) {
  const Eigen::RowVectorXd column_sums = physics.coefficients().inverse_entries.colwise().sum();
  return (s.rho.cwiseProduct(s.u) * column_sums.transpose()) / double(s.n_components());
}

/// d_x v - K~ rho^gamma - v V
Field alpha_rate(const EulerState& s, const Field& flux, const Physics& physics) {
  const Field v = average_velocity(s.u);
  const Field rho = total_density(s);
  return ddx(s.grid, v).array() -
         physics.coefficients().effective_pressure_coeff * rho.array().pow(physics.params().polytropic_index()) -
         v.array() * flux.array();
}

double sample(const Grid& grid, const Field& f, double x) {
  Field at(1);
  at[0] = x;
  return interpolate_linear<double>(grid.nodes(), f, at)(0, 0);
}

}  // namespace

EffectiveFluxSeries effective_flux_series(const EulerTrajectory& trajectory, const Physics& physics, int n_paths,
                                          double quadrature_tolerance) {
  const auto states = all_states(trajectory);
  EffectiveFluxSeries series;
  std::vector<Field> rates;
  for (const EulerState* s : states) {
    series.times.push_back(s->time);
    series.flux.push_back(flux_potential(*s, physics));
    rates.push_back(alpha_rate(*s, series.flux.back(), physics));
  }

  const std::size_t m = states.size();
  series.alpha.push_back(cumulative_integral(states.front()->grid, series.flux.front()));
  for (std::size_t k = 1; k < m; ++k) {
    const double dt = series.times[k] - series.times[k - 1];
    series.alpha.push_back(series.alpha.back() + 0.5 * dt * (rates[k - 1] + rates[k]));
  }

  // Same quadrature on every other sample; compared where both are defined.
  if (m >= 3) {
    Field coarse = series.alpha.front();
    for (std::size_t k = 2; k < m; k += 2) {
      coarse += 0.5 * (series.times[k] - series.times[k - 2]) * (rates[k - 2] + rates[k]);
      series.quadrature_error =
          std::max(series.quadrature_error, (coarse - series.alpha[k]).cwiseAbs().maxCoeff());
    }
  }
  series.insufficient_snapshots = series.quadrature_error > quadrature_tolerance;

  const Grid& grid = states.front()->grid;
  for (int p = 0; p < n_paths; ++p) {
    ParticlePath path;
    double x = (p + 0.5) / n_paths;
    for (std::size_t k = 0; k < m; ++k) {
      const Field rho = total_density(*states[k]);
      path.position.push_back(x);
      path.rho_exp_alpha.push_back(sample(grid, rho, x) * std::exp(sample(grid, series.alpha[k], x)));
      if (k + 1 < m) {
        const Field v = average_velocity(states[k]->u);
        x = std::clamp(x + (series.times[k + 1] - series.times[k]) * sample(grid, v, x), 0.0, grid.length());
      }
    }
    series.paths.push_back(std::move(path));
  }
  return series;
}

InvariantEntry effective_flux_monotonicity(const EffectiveFluxSeries& series, double flux_coeff) {
  InvariantEntry entry{"effective_flux_monotonicity", 0.0, 0.0, true, true, ""};
  double worst_ratio = 0.0;
  for (const auto& path : series.paths) {
    for (std::size_t k = 1; k < path.rho_exp_alpha.size(); ++k) {
      const double rise = path.rho_exp_alpha[k] - path.rho_exp_alpha[k - 1];
      const double tolerance = flux_coeff * (series.times[k] - series.times[k - 1]);
      if (rise > 0.0) entry.exact = false;
      if (rise > tolerance) entry.passed = false;
      if (rise > 0.0 && tolerance > 0.0 && rise / tolerance >= worst_ratio) {
        worst_ratio = rise / tolerance;
        entry.max_violation = rise;
        entry.tolerance = tolerance;
      }
    }
  }
  entry.detail = std::to_string(series.paths.size()) + " paths, largest rise/tolerance " + format(worst_ratio) +
                 ", alpha quadrature error " + format(series.quadrature_error);
  if (series.insufficient_snapshots) {
    entry.passed = false;
    entry.detail += " (snapshots too sparse for the alpha quadrature)";
  }
  return entry;
}

H1VelocitySeries h1_velocity_series(const EulerTrajectory& trajectory, const Physics& physics) {
  const auto states = all_states(trajectory);
  H1VelocitySeries series;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (k > 0) cumulative += beta_increment(*states[k - 1], *states[k], physics.viscosity());
    series.times.push_back(states[k]->time);
    series.gradient_energy.push_back(gradient_energy(*states[k], physics.viscosity()));
    series.cumulative.push_back(cumulative);
    series.beta.push_back(series.gradient_energy.back() + cumulative);
  }
  return series;
}

double DensityRateSeries::sup() const {
  double out = 0.0;
  for (const auto& r : rate_norm) out = std::max(out, r.maxCoeff());
  return out;
}

DensityRateSeries density_time_derivative_norm(const EulerTrajectory& trajectory) {
  const auto states = all_states(trajectory);
  DensityRateSeries series;
  for (std::size_t k = 1; k < states.size(); ++k) {
    const EulerState& a = *states[k - 1];
    const EulerState& b = *states[k];
    const double dt = b.time - a.time;
    if (!(dt > 0.0)) continue;
    series.times.push_back(0.5 * (a.time + b.time));
    series.rate_norm.push_back(integrate_columns(a.grid, ((b.rho - a.rho) / dt).cwiseAbs2()).cwiseSqrt());
    const Field v = average_velocity(a.u);
    series.flux_norm.push_back(integrate_columns(a.grid, upwind_flux_divergence(a.grid, a.rho, v).cwiseAbs2()).cwiseSqrt());
  }
  return series;
}

double sup_lograd_norm(const LagrangeTrajectory& trajectory) {
  double out = 0.0;
  for (const LagrangeState* s : all_states(trajectory)) out = std::max(out, lograd_norm(*s));
  return out;
}

InvariantEntry refinement_stability(const std::string& name, double coarse, double fine, double tolerance) {
  const double scale = std::max(std::abs(coarse), std::numeric_limits<double>::min());
  const double change = std::abs(fine - coarse) / scale;
  InvariantEntry entry{name, change, tolerance, change < tolerance, change == 0.0, ""};
  entry.detail = "n: " + format(coarse) + ", 2n: " + format(fine);
  return entry;
}

double l2_distance(const EulerState& a, const EulerState& b) {
  if (!(a.grid == b.grid) || a.rho.cols() != b.rho.cols()) throw ShapeError("l2_distance: states differ in layout");
  const double rho = integrate_columns(a.grid, (a.rho - b.rho).cwiseAbs2()).sum();
  const double u = integrate_columns(a.grid, (a.u - b.u).cwiseAbs2()).sum();
  return std::sqrt(rho + u);
}

CrossDistance cross_coordinate_distance(const EulerTrajectory& euler, const LagrangeTrajectory& lagrange,
                                        double volume_tolerance) {
  const auto a = all_states(euler);
  const auto b = all_states(lagrange);
  if (a.size() != b.size()) throw ShapeError("cross_coordinate_distance: snapshot counts differ");
  CrossDistance out;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k]->time - b[k]->time) > 1e-12 * std::max(1.0, std::abs(a[k]->time))) {
      throw ShapeError("cross_coordinate_distance: snapshot times differ");
    }
    const double d = l2_distance(*a[k], to_eulerian(*b[k], volume_tolerance));
    out.times.push_back(a[k]->time);
    out.distance.push_back(d);
    out.sup = std::max(out.sup, d);
  }
  return out;
}

InvariantReport run_invariant_suite(const EulerTrajectory& trajectory, const Physics& physics,
                                    const Tolerances& tol) {
  InvariantReport report;
  report.scope = physics.params().within_theorem_scope() ? "theorem-scope" : "outside-scope";
  const auto& records = trajectory.records;
  const double h = trajectory.final_state.grid.spacing();

  guarded(report, "mass_conservation", [&] { return mass_conservation(records, tol.mass_drift); });
  guarded(report, "concentration_bounds", [&] { return concentration_bounds(trajectory, tol.concentration); });
  guarded(report, "energy_monotonicity", [&] { return energy_monotonicity(records, h, tol.energy_coeff); });
  guarded(report, "dissipation_accounting",
          [&] { return dissipation_accounting(records, physics.coercivity(), tol.dissipation_epsilon); });
  guarded(report, "density_bounds", [&] { return density_bounds(records, tol.density_floor, tol.density_ceiling); });
  guarded(report, "boundary_velocity", [&] {
    std::vector<double> ends;
    for (const EulerState* s : all_states(trajectory)) {
      for (Eigen::Index i = 0; i < s->u.cols(); ++i) {
        ends.push_back(s->u(0, i));
        ends.push_back(s->u(s->grid.n_cells(), i));
      }
    }
    return boundary_velocity(ends);
  });
  guarded(report, "effective_flux_monotonicity", [&] {
    return effective_flux_monotonicity(effective_flux_series(trajectory, physics, tol.n_paths, tol.alpha_quadrature),
                                       tol.flux_coeff);
  });
  guarded(report, "bounded_gradients", [&] { return bounded_gradients(records); });
  guarded(report, "density_rate_consistency", [&] {
    const DensityRateSeries series = density_time_derivative_norm(trajectory);
    double sup_flux = 0.0;
    for (const auto& f : series.flux_norm) sup_flux = std::max(sup_flux, f.maxCoeff());
    InvariantEntry entry{"density_rate_consistency", 0.0, tol.density_rate_slack * sup_flux, true, true, ""};
    for (std::size_t k = 0; k < series.rate_norm.size(); ++k) {
      Eigen::RowVectorXd bound = series.flux_norm[k];
      if (k + 1 < series.flux_norm.size()) bound = bound.cwiseMax(series.flux_norm[k + 1]);
      const double excess = (series.rate_norm[k] - bound).maxCoeff();
      entry.max_violation = std::max(entry.max_violation, excess);
    }
    entry.passed = entry.max_violation <= entry.tolerance;
    entry.exact = entry.max_violation <= 0.0;
    entry.detail = "sup ||d_t rho_i|| " + format(series.sup()) + ", sup ||d_x(rho_i v)|| " + format(sup_flux);
    return entry;
  });
  return report;
}

InvariantReport run_invariant_suite(const LagrangeTrajectory& trajectory, const Physics& physics,
                                    const Tolerances& tol) {
  InvariantReport report;
  report.scope = physics.params().within_theorem_scope() ? "theorem-scope" : "outside-scope";
  const auto& records = trajectory.records;
  // tau_E uses the Eulerian spacing 1/n so both coordinate systems share a threshold
  const double h = 1.0 / trajectory.final_state.grid.n_cells();

  guarded(report, "mass_conservation", [&] { return mass_conservation(records, tol.mass_drift); });
  guarded(report, "concentration_exact", [&] { return concentration_bounds(trajectory); });
  guarded(report, "energy_monotonicity", [&] { return energy_monotonicity(records, h, tol.energy_coeff); });
  guarded(report, "dissipation_accounting",
          [&] { return dissipation_accounting(records, physics.coercivity(), tol.dissipation_epsilon); });
  guarded(report, "density_bounds", [&] { return density_bounds(records, tol.density_floor, tol.density_ceiling); });
  guarded(report, "boundary_velocity", [&] {
    std::vector<double> ends;
    for (const LagrangeState* s : all_states(trajectory)) {
      for (Eigen::Index i = 0; i < s->u.cols(); ++i) {
        ends.push_back(s->u(0, i));
        ends.push_back(s->u(s->grid.n_cells(), i));
      }
    }
    return boundary_velocity(ends);
  });
  guarded(report, "volume_consistency", [&] {
    InvariantEntry entry{"volume_consistency", 0.0, tol.volume_consistency, false, false, ""};
    for (const LagrangeState* s : all_states(trajectory)) {
      const double volume = integrate(s->grid, Field(s->rho.cwiseInverse()));
      entry.max_violation = std::max(entry.max_violation, std::abs(volume - 1.0));
    }
    entry.passed = entry.max_violation <= entry.tolerance;
    entry.exact = entry.max_violation == 0.0;
    entry.detail = "|int_0^d dy/rho - 1| over all snapshots";
    return entry;
  });
  guarded(report, "bounded_gradients", [&] { return bounded_gradients(records); });
  return report;
}

}  // namespace multifluid
