#pragma once

// Physical parameters of the polytropic multifluid, the pressure law and the
// viscosity-matrix algebra.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "multifluid/errors.hpp"
#include "multifluid/grid.hpp"

namespace multifluid {

template <typename Scalar>
class FluidParamsT {
 public:
  FluidParamsT(int n_components, Scalar pressure_const, Scalar polytropic_index)
      : n_components_(n_components), pressure_const_(pressure_const), polytropic_index_(polytropic_index) {
    if (n_components < 1) throw ValidationError("n_components", "n_components must be at least 1");
    if (!(pressure_const > Scalar(0)) || !std::isfinite(double(pressure_const))) {
      throw ValidationError("pressure_const", "pressure_const must be positive");
    }
    if (!(polytropic_index > Scalar(1)) || !std::isfinite(double(polytropic_index))) {
      throw ValidationError("polytropic_index", "polytropic_index must exceed 1");
    }
  }

  int n_components() const { return n_components_; }
  Scalar pressure_const() const { return pressure_const_; }
  Scalar polytropic_index() const { return polytropic_index_; }

  /// Global solvability is only claimed for two or more constituents; a
  /// single gas is kept as a regression baseline.
  bool within_theorem_scope() const { return n_components_ >= 2; }

 private:
  int n_components_;
  Scalar pressure_const_;
  Scalar polytropic_index_;
};

/// Symmetric N x N viscosity matrix. Symmetry is required bitwise; positive
/// definiteness is probed once by a Cholesky attempt and exposed as
/// admissible() so inadmissible matrices can still be inspected.
template <typename Scalar>
class ViscosityMatrixT {
 public:
  template <typename Derived>
  explicit ViscosityMatrixT(const Eigen::MatrixBase<Derived>& entries) : entries_(entries) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
      throw ValidationError("viscosity", "viscosity matrix must be square and non-empty");
    }
    if (!entries_.allFinite()) throw ValidationError("viscosity", "viscosity matrix has non-finite entries");
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < entries_.cols(); ++j) {
        if (entries_(i, j) != entries_(j, i)) {
          throw ValidationError("viscosity", "viscosity matrix must be symmetric (entry " + std::to_string(i) +
                                                 "," + std::to_string(j) + ")");
        }
      }
    }
    admissible_ = Eigen::LLT<MatrixX<Scalar>>(entries_).info() == Eigen::Success;
  }

  const MatrixX<Scalar>& entries() const { return entries_; }
  Eigen::Index size() const { return entries_.rows(); }
  bool admissible() const { return admissible_; }

 private:
  MatrixX<Scalar> entries_;
  bool admissible_ = false;
};

template <typename Scalar>
struct DerivedCoefficientsT {
  MatrixX<Scalar> inverse_entries;
  /// (K/N) times the sum of all entries of the inverse matrix.
  Scalar effective_pressure_coeff;
};

template <typename Scalar>
struct CoercivityResult {
  Scalar value;
  bool admissible;
};

using FluidParams = FluidParamsT<double>;
using ViscosityMatrix = ViscosityMatrixT<double>;
using DerivedCoefficients = DerivedCoefficientsT<double>;

template <typename Scalar>
Scalar pressure(Scalar rho_total, const FluidParamsT<Scalar>& params) {
  if (rho_total < Scalar(0)) throw DomainError("pressure: negative density");
  using std::pow;
  return params.pressure_const() * pow(rho_total, params.polytropic_index());
}

/// Nodewise pressure of a total-density field.
template <typename Scalar, typename Derived>
PlainOf<Derived> pressure_field(const Eigen::MatrixBase<Derived>& rho_total, const FluidParamsT<Scalar>& params) {
  if ((rho_total.array() < Scalar(0)).any()) throw DomainError("pressure: negative density");
  return (params.pressure_const() * rho_total.array().pow(params.polytropic_index())).matrix();
}

/// Smallest eigenvalue of M (the constant in (M xi, xi) >= C0 |xi|^2).
template <typename Scalar>
CoercivityResult<Scalar> coercivity_constant(const ViscosityMatrixT<Scalar>& viscosity) {
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(viscosity.entries(), Eigen::EigenvaluesOnly);
  const Scalar smallest = solver.eigenvalues().minCoeff();
  return {smallest, viscosity.admissible() && smallest > Scalar(0)};
}

template <typename Scalar>
DerivedCoefficientsT<Scalar> derived_coefficients(const ViscosityMatrixT<Scalar>& viscosity,
                                                  const FluidParamsT<Scalar>& params) {
  if (viscosity.size() != params.n_components()) {
    throw ShapeError("viscosity matrix size does not match n_components");
  }
  if (!viscosity.admissible()) throw InadmissibleMatrixError("viscosity matrix is not positive definite");
  const Eigen::PartialPivLU<MatrixX<Scalar>> lu(viscosity.entries());
  DerivedCoefficientsT<Scalar> out;
  out.inverse_entries = lu.inverse();
  out.effective_pressure_coeff =
      params.pressure_const() / Scalar(params.n_components()) * out.inverse_entries.sum();
  if (!(out.effective_pressure_coeff > Scalar(0))) {
    throw InadmissibleMatrixError("effective pressure coefficient is not positive");
  }
  return out;
}

/// v = (1/N) sum_i u_i, for component fields stored one per column.
template <typename Derived>
auto average_velocity(const Eigen::MatrixBase<Derived>& u) {
  return u.rowwise().mean();
}

template <typename Scalar>
VectorX<Scalar> average_velocity(std::span<const VectorX<Scalar>> u) {
  if (u.empty()) throw ShapeError("average_velocity: no components");
  VectorX<Scalar> sum = u.front();
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (u[i].size() != sum.size()) throw ShapeError("average_velocity: component fields on different grids");
    sum += u[i];
  }
  return sum / Scalar(u.size());
}

struct InitialDataReport {
  std::vector<std::string> violations;
  bool outside_theorem_scope = false;

  bool accepted() const { return violations.empty(); }
};

/// Checks the solvability hypotheses on sampled initial data: strictly
/// positive densities, velocities vanishing at both ends, finite discrete
/// W^1_2 norms. Each failure is listed separately.
template <typename Scalar, typename DerivedR, typename DerivedU>
InitialDataReport validate_initial_data(const GridT<Scalar>& grid, const Eigen::MatrixBase<DerivedR>& rho0,
                                        const Eigen::MatrixBase<DerivedU>& u0) {
  InitialDataReport report;
  if (rho0.rows() != grid.n_nodes() || u0.rows() != grid.n_nodes() || rho0.cols() != u0.cols() ||
      rho0.cols() == 0) {
    report.violations.push_back("shape: density and velocity fields must have one column per component and one row "
                                "per grid node");
    return report;
  }
  report.outside_theorem_scope = rho0.cols() < 2;
  const Eigen::Index n = grid.n_cells();
  for (Eigen::Index i = 0; i < rho0.cols(); ++i) {
    const std::string tag = "component " + std::to_string(i + 1);
    if (!rho0.col(i).allFinite() || !u0.col(i).allFinite()) {
      report.violations.push_back(tag + ": non-finite samples");
      continue;
    }
    if (!(rho0.col(i).minCoeff() > Scalar(0))) report.violations.push_back(tag + ": density must be positive");
    // sin(pi x) sampled at x = 1 is 1e-16, not 0; accept values at rounding level.
    const Scalar scale = std::max(Scalar(1), u0.col(i).cwiseAbs().maxCoeff());
    const Scalar boundary_tol = Scalar(1e-12) * scale;
    if (std::abs(u0(0, i)) > boundary_tol || std::abs(u0(n, i)) > boundary_tol) {
      report.violations.push_back(tag + ": velocity must vanish at both boundaries");
    }
    const VectorX<Scalar> rho = rho0.col(i);
    const VectorX<Scalar> u = u0.col(i);
    const Scalar w12_rho = integrate(grid, rho.cwiseAbs2()) + integrate(grid, ddx(grid, rho).cwiseAbs2());
    const Scalar w12_u = integrate(grid, u.cwiseAbs2()) + integrate(grid, ddx(grid, u).cwiseAbs2());
    if (!std::isfinite(double(w12_rho)) || !std::isfinite(double(w12_u))) {
      report.violations.push_back(tag + ": discrete W^1_2 norm is not finite");
    }
  }
  return report;
}

}  // namespace multifluid
