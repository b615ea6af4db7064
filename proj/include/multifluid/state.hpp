#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "multifluid/grid.hpp"
#include "multifluid/model.hpp"

namespace multifluid {

/// One column per constituent, one row per grid node.
using ComponentFields = Eigen::MatrixXd;

/// Fluid parameters and viscosity matrix, checked for consistency once.
class Physics {
 public:
  Physics(FluidParams params, ViscosityMatrix viscosity);

  const FluidParams& params() const { return params_; }
  const ViscosityMatrix& viscosity() const { return viscosity_; }
  const DerivedCoefficients& coefficients() const { return coefficients_; }
  double coercivity() const { return coercivity_; }
  int n_components() const { return params_.n_components(); }

 private:
  FluidParams params_;
  ViscosityMatrix viscosity_;
  DerivedCoefficients coefficients_;
  double coercivity_;
};

/// Densities and velocities on the unit interval. Velocities vanish at both ends.
struct EulerState {
  double time = 0.0;
  Grid grid;
  ComponentFields rho;
  ComponentFields u;

  int n_components() const { return int(rho.cols()); }
};

/// Fields on the mass-coordinate interval [0, d]. The state stores the total
/// density and the concentrations rho_i / rho; the concentrations are fixed at
/// construction and the component densities are derived from them.
struct LagrangeState {
  double time = 0.0;
  Grid grid;
  Field rho;
  ComponentFields concentration;
  ComponentFields u;

  int n_components() const { return int(concentration.cols()); }
  double total_mass() const { return grid.length(); }
  ComponentFields component_densities() const { return concentration.array().colwise() * rho.array(); }
};

/// Momentum forcing f_i(x, t), added on the right of the momentum equations.
/// An empty function means the unforced system.
using SourceTerms = std::function<ComponentFields(const Grid&, double)>;

struct TimeControl {
  double final_time = 1.0;
  double cfl = 0.5;
  double dt_max = 1e-3;
  /// Floor for halving after a rejected step; <= 0 selects 1e-10 * final_time.
  double dt_min = 0.0;
  int snapshot_stride = 10;
  /// When non-empty, these step sizes are replayed instead of the adaptive
  /// rule (used to run two trajectories on one time grid).
  std::vector<double> dt_schedule;

  double effective_dt_min() const { return dt_min > 0.0 ? dt_min : 1e-10 * final_time; }
};

/// Per-step diagnostics; record 0 describes the initial state.
struct StepRecord {
  double time = 0.0;
  double dt = 0.0;
  double energy = 0.0;
  double dissipation_rate = 0.0;
  Eigen::RowVectorXd component_mass;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double lograd_norm = 0.0;
  double beta = 0.0;
};

template <typename State>
struct Trajectory {
  explicit Trajectory(State initial) : final_state(std::move(initial)) {}

  /// States after steps 0, stride, 2*stride, ...
  std::vector<State> snapshots;
  std::vector<StepRecord> records;
  State final_state;
  int steps = 0;
  int snapshot_stride = 1;
  bool aborted = false;
  std::string abort_reason;

  std::vector<double> step_sizes() const {
    std::vector<double> dts;
    for (std::size_t k = 1; k < records.size(); ++k) dts.push_back(records[k].dt);
    return dts;
  }
};

using EulerTrajectory = Trajectory<EulerState>;
using LagrangeTrajectory = Trajectory<LagrangeState>;

Field total_density(const EulerState& s);

/// Builds a state from sampled data; velocities are set to exactly zero at
/// the two end nodes. Throws ValidationError listing every violated hypothesis.
EulerState make_euler_state(const Grid& grid, ComponentFields rho, ComponentFields u, double time = 0.0);

}  // namespace multifluid
