#include "multifluid/state.hpp"

#include <numeric>

namespace multifluid {

Physics::Physics(FluidParams params, ViscosityMatrix viscosity)
    : params_(params), viscosity_(std::move(viscosity)), coercivity_(0.0) {
  if (viscosity_.size() != params_.n_components()) {
    throw ValidationError("viscosity", "viscosity matrix is " + std::to_string(viscosity_.size()) + "x" +
                                          std::to_string(viscosity_.size()) + " but n_components is " +
                                          std::to_string(params_.n_components()));
  }
  if (!viscosity_.admissible()) throw InadmissibleMatrixError("viscosity matrix is not positive definite");
  coefficients_ = derived_coefficients(viscosity_, params_);
  coercivity_ = coercivity_constant(viscosity_).value;
}

Field total_density(const EulerState& s) { return s.rho.rowwise().sum(); }

EulerState make_euler_state(const Grid& grid, ComponentFields rho, ComponentFields u, double time) {
  const InitialDataReport report = validate_initial_data(grid, rho, u);
  if (!report.accepted()) {
    std::string message;
    for (const auto& v : report.violations) message += (message.empty() ? "" : "; ") + v;
    throw ValidationError("initial_data", message);
  }
  u.row(0).setZero();
  u.row(grid.n_cells()).setZero();
  return EulerState{time, grid, std::move(rho), std::move(u)};
}

}  // namespace multifluid
