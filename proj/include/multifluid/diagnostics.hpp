#pragma once

// Solution functionals appearing in the a priori estimates, evaluated on
// discrete states and trajectories, and the pass/fail judgement of each
// estimate over a whole run.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "multifluid/state.hpp"

namespace multifluid {

struct EnergyReport {
  /// 1/2 int rho_i u_i^2 for each constituent.
  Eigen::RowVectorXd kinetic;
  /// N K/(gamma-1) int rho^gamma: the pressure part summed over constituents.
  double potential = 0.0;
  double total = 0.0;
  /// sum_i int |d_x u_i|^2.
  double dissipation_rate = 0.0;
  Eigen::RowVectorXd component_mass;
};

/// Eulerian energy on [0,1].
EnergyReport energy(const EulerState& s, const Physics& physics);
/// The same functionals in mass coordinates (dx = dy / rho, d_x = rho d_y).
EnergyReport energy(const LagrangeState& s, const Physics& physics);

/// L2(0,d) norm of w = d_y ln rho.
double lograd_norm(const LagrangeState& s);
/// L2(0,1) norm of d_x ln rho (the Eulerian counterpart, for archives).
double lograd_norm(const EulerState& s);

/// sum_ij mu_ij int (d_x u_i)(d_x u_j).
double gradient_energy(const EulerState& s, const ViscosityMatrix& viscosity);
double gradient_energy(const LagrangeState& s, const ViscosityMatrix& viscosity);

/// Integrand of the cumulative part of beta over one interval, times its
/// length: sum_i int rho_i (d_t u_i)^2 + (1/rho_i)(sum_j mu_ij d_xx u_j)^2,
/// with d_t u_i a backward difference and the rest at the later state.
double beta_increment(const EulerState& before, const EulerState& after, const ViscosityMatrix& viscosity);
double beta_increment(const LagrangeState& before, const LagrangeState& after, const ViscosityMatrix& viscosity);

/// Tracks the running beta(t) and produces one StepRecord per state.
template <typename State>
class StepRecorder {
 public:
  explicit StepRecorder(const Physics& physics) : physics_(&physics) {}

  StepRecord record(const State& s, double dt);

 private:
  const Physics* physics_;
  std::optional<State> previous_;
  double cumulative_ = 0.0;
};

extern template class StepRecorder<EulerState>;
extern template class StepRecorder<LagrangeState>;

struct InvariantEntry {
  std::string name;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  /// Holds with zero violation (bitwise equality where applicable).
  bool exact = false;
  std::string detail;
};

struct InvariantReport {
  /// "theorem-scope" for N >= 2, "outside-scope" for a single constituent.
  std::string scope;
  std::vector<InvariantEntry> entries;

  bool all_passed() const;
  const InvariantEntry* find(const std::string& name) const;
};

/// Suite thresholds. Every value is explicit so a report can be reproduced.
struct Tolerances {
  /// tau_E = energy_coeff * dt * h bounds a single-step energy increase.
  double energy_coeff = 10.0;
  /// Fraction of C0(M) allowed to go missing in the dissipation balance.
  double dissipation_epsilon = 0.1;
  /// delta_h for the Eulerian concentration bounds.
  double concentration = 1e-3;
  double mass_drift = 1e-10;
  double density_floor = 1e-3;
  double density_ceiling = 10.0;
  /// rho e^alpha may rise by at most flux_coeff * dt between samples.
  double flux_coeff = 5.0;
  /// Largest acceptable change of alpha when the snapshot stride is doubled.
  double alpha_quadrature = 1e-3;
  double volume_consistency = 1e-6;
  /// Relative slack in ||d_t rho_i|| <= ||d_x(rho_i v)||.
  double density_rate_slack = 0.1;
  /// Relative change allowed between resolutions n and 2n.
  double refinement = 0.1;
  int n_paths = 16;
};

InvariantEntry concentration_bounds(const EulerTrajectory& trajectory, double tolerance);
/// In mass coordinates the concentrations must equal their initial values bitwise.
InvariantEntry concentration_bounds(const LagrangeTrajectory& trajectory);

InvariantEntry energy_monotonicity(const std::vector<StepRecord>& records, double spacing, double energy_coeff);
/// E(0) - E(T) >= (1 - epsilon) C0 sum_n dt_n D_n, D the dissipation rate.
InvariantEntry dissipation_accounting(const std::vector<StepRecord>& records, double coercivity, double epsilon);
InvariantEntry mass_conservation(const std::vector<StepRecord>& records, double tolerance);
InvariantEntry density_bounds(const std::vector<StepRecord>& records, double floor, double ceiling);

struct ParticlePath {
  std::vector<double> position;
  std::vector<double> rho_exp_alpha;
};

struct EffectiveFluxSeries {
  std::vector<double> times;
  /// V = (1/N) sum_ij inv(M)_ij rho_j u_j at each snapshot.
  std::vector<Field> flux;
  /// alpha(x,t) = int_0^t (d_x v - K~ rho^gamma - v V) + int_0^x V_0.
  std::vector<Field> alpha;
  std::vector<ParticlePath> paths;
  /// max |alpha| change when every other snapshot is dropped.
  double quadrature_error = 0.0;
  bool insufficient_snapshots = false;
};

EffectiveFluxSeries effective_flux_series(const EulerTrajectory& trajectory, const Physics& physics, int n_paths,
                                          double quadrature_tolerance);
InvariantEntry effective_flux_monotonicity(const EffectiveFluxSeries& series, double flux_coeff);

struct H1VelocitySeries {
  std::vector<double> times;
  std::vector<double> gradient_energy;
  std::vector<double> cumulative;
  std::vector<double> beta;
};

H1VelocitySeries h1_velocity_series(const EulerTrajectory& trajectory, const Physics& physics);

struct DensityRateSeries {
  /// Midpoint of each snapshot interval.
  std::vector<double> times;
  /// ||(rho_i^{k+1} - rho_i^k) / dt||_L2, one row per interval.
  std::vector<Eigen::RowVectorXd> rate_norm;
  /// ||d_x(rho_i v)||_L2 from the conservative upwind flux at the earlier snapshot.
  std::vector<Eigen::RowVectorXd> flux_norm;

  double sup() const;
};

DensityRateSeries density_time_derivative_norm(const EulerTrajectory& trajectory);

/// Sup over snapshots of lograd_norm.
double sup_lograd_norm(const LagrangeTrajectory& trajectory);

/// Compares a bounded quantity at two resolutions: passes when the relative
/// change is below the tolerance.
InvariantEntry refinement_stability(const std::string& name, double coarse, double fine, double tolerance);

InvariantReport run_invariant_suite(const EulerTrajectory& trajectory, const Physics& physics,
                                    const Tolerances& tolerances);
InvariantReport run_invariant_suite(const LagrangeTrajectory& trajectory, const Physics& physics,
                                    const Tolerances& tolerances);

/// Discrete L2 distance between two Eulerian states on the same grid,
/// over all densities and velocities.
double l2_distance(const EulerState& a, const EulerState& b);

struct CrossDistance {
  std::vector<double> times;
  /// l2_distance between the Eulerian snapshot and the transformed Lagrangian one.
  std::vector<double> distance;
  double sup = 0.0;
};

/// Compares two runs of the same initial data on one time grid, snapshot by
/// snapshot (and the final states). Throws ShapeError when the snapshot times differ.
CrossDistance cross_coordinate_distance(const EulerTrajectory& euler, const LagrangeTrajectory& lagrange,
                                        double volume_tolerance);

}  // namespace multifluid
