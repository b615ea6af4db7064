#pragma once

// Uniform node-centred 1D grids and the discrete calculus shared by the
// Eulerian and Lagrangian solvers. Every operator accepts any Eigen
// expression whose rows are the grid nodes; columns are independent fields,
// so a matrix of N component fields is differentiated in one call.

#include <Eigen/Dense>

#include <string>

#include "multifluid/errors.hpp"

namespace multifluid {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Uniform grid on [0, length] with n_cells + 1 equispaced nodes.
template <typename Scalar>
class GridT {
 public:
  static constexpr int kMinCells = 8;

  GridT(int n_cells, Scalar length) : n_cells_(n_cells), length_(length) {
    if (n_cells < kMinCells) {
      throw ValidationError("n_cells", "grid needs at least " + std::to_string(kMinCells) + " cells");
    }
    if (!(length > Scalar(0))) throw ValidationError("length", "grid length must be positive");
  }

  int n_cells() const { return n_cells_; }
  Eigen::Index n_nodes() const { return n_cells_ + 1; }
  Scalar length() const { return length_; }
  Scalar spacing() const { return length_ / Scalar(n_cells_); }

  /// Node k; the last node is `length` exactly.
  Scalar node(Eigen::Index k) const {
    return k == n_cells_ ? length_ : length_ * Scalar(k) / Scalar(n_cells_);
  }

  VectorX<Scalar> nodes() const {
    VectorX<Scalar> x(n_nodes());
    for (Eigen::Index k = 0; k < n_nodes(); ++k) x[k] = node(k);
    return x;
  }

  /// Dual-cell widths: h in the interior, h/2 at the two boundary nodes.
  /// Summing weight * value is the composite trapezoid rule.
  VectorX<Scalar> weights() const {
    VectorX<Scalar> w = VectorX<Scalar>::Constant(n_nodes(), spacing());
    w[0] = w[n_cells_] = spacing() / Scalar(2);
    return w;
  }

  template <typename Derived>
  void check(const Eigen::MatrixBase<Derived>& f, const char* what = "field") const {
    if (f.rows() != n_nodes()) {
      throw ShapeError(std::string(what) + " has " + std::to_string(f.rows()) + " values, grid has " +
                       std::to_string(n_nodes()) + " nodes");
    }
  }

  bool operator==(const GridT&) const = default;

 private:
  int n_cells_;
  Scalar length_;
};

using Grid = GridT<double>;
using Field = VectorX<double>;

template <typename Derived>
using PlainOf = typename Derived::PlainObject;

/// First derivative: central differences inside, second-order one-sided at both ends.
template <typename Scalar, typename Derived>
PlainOf<Derived> ddx(const GridT<Scalar>& grid, const Eigen::MatrixBase<Derived>& f) {
  grid.check(f);
  const Eigen::Index n = grid.n_cells();
  const Scalar two_h = Scalar(2) * grid.spacing();
  PlainOf<Derived> out(f.rows(), f.cols());
  out.middleRows(1, n - 1) = (f.middleRows(2, n - 1) - f.middleRows(0, n - 1)) / two_h;
  out.row(0) = (Scalar(-3) * f.row(0) + Scalar(4) * f.row(1) - f.row(2)) / two_h;
  out.row(n) = (Scalar(3) * f.row(n) - Scalar(4) * f.row(n - 1) + f.row(n - 2)) / two_h;
  return out;
}

/// Second derivative: 3-point stencil inside, 4-point one-sided (second order) at the ends.
template <typename Scalar, typename Derived>
PlainOf<Derived> d2dx2(const GridT<Scalar>& grid, const Eigen::MatrixBase<Derived>& f) {
  grid.check(f);
  const Eigen::Index n = grid.n_cells();
  const Scalar h2 = grid.spacing() * grid.spacing();
  PlainOf<Derived> out(f.rows(), f.cols());
  out.middleRows(1, n - 1) =
      (f.middleRows(0, n - 1) - Scalar(2) * f.middleRows(1, n - 1) + f.middleRows(2, n - 1)) / h2;
  out.row(0) = (Scalar(2) * f.row(0) - Scalar(5) * f.row(1) + Scalar(4) * f.row(2) - f.row(3)) / h2;
  out.row(n) =
      (Scalar(2) * f.row(n) - Scalar(5) * f.row(n - 1) + Scalar(4) * f.row(n - 2) - f.row(n - 3)) / h2;
  return out;
}

/// Composite trapezoid rule of every column.
template <typename Scalar, typename Derived>
RowVectorX<Scalar> integrate_columns(const GridT<Scalar>& grid, const Eigen::MatrixBase<Derived>& f) {
  grid.check(f);
  const Eigen::Index n = grid.n_cells();
  return grid.spacing() * (f.colwise().sum() - (f.row(0) + f.row(n)) / Scalar(2));
}

template <typename Scalar, typename Derived>
Scalar integrate(const GridT<Scalar>& grid, const Eigen::MatrixBase<Derived>& f) {
  if (f.cols() != 1) throw ShapeError("integrate expects a single field");
  return integrate_columns(grid, f)(0);
}

/// Running trapezoid integral from node 0; the last entry equals integrate(f).
template <typename Scalar, typename Derived>
VectorX<Scalar> cumulative_integral(const GridT<Scalar>& grid, const Eigen::MatrixBase<Derived>& f) {
  grid.check(f);
  VectorX<Scalar> out(f.rows());
  out[0] = Scalar(0);
  const Scalar half_h = grid.spacing() / Scalar(2);
  for (Eigen::Index k = 1; k < f.rows(); ++k) out[k] = out[k - 1] + half_h * (f(k - 1, 0) + f(k, 0));
  return out;
}

/// Upwind approximation of the slope of f: backward where v > 0, forward where
/// v < 0, zero where v == 0. At an end node the only available one-sided
/// difference is used.
template <typename Scalar, typename DerivedF, typename DerivedV>
PlainOf<DerivedF> upwind_advect(const GridT<Scalar>& grid, const Eigen::MatrixBase<DerivedF>& f,
                                const Eigen::MatrixBase<DerivedV>& v) {
  grid.check(f);
  grid.check(v, "velocity");
  const Eigen::Index n = grid.n_cells();
  const Scalar h = grid.spacing();
  PlainOf<DerivedF> out(f.rows(), f.cols());
  for (Eigen::Index k = 0; k <= n; ++k) {
    const Scalar vk = v(k, 0);
    if (vk > Scalar(0)) {
      out.row(k) = k > 0 ? (f.row(k) - f.row(k - 1)) / h : (f.row(1) - f.row(0)) / h;
    } else if (vk < Scalar(0)) {
      out.row(k) = k < n ? (f.row(k + 1) - f.row(k)) / h : (f.row(n) - f.row(n - 1)) / h;
    } else {
      out.row(k).setZero();
    }
  }
  return out;
}

/// Conservative d/dx(f v) on dual cells. Face velocities are node averages,
/// the face value of f is taken from the upwind node, and no flux crosses the
/// two ends. Weighted by grid.weights() the result sums to zero exactly up to
/// rounding, which is what keeps trapezoid masses constant.
template <typename Scalar, typename DerivedF, typename DerivedV>
PlainOf<DerivedF> upwind_flux_divergence(const GridT<Scalar>& grid, const Eigen::MatrixBase<DerivedF>& f,
                                         const Eigen::MatrixBase<DerivedV>& v) {
  grid.check(f);
  grid.check(v, "velocity");
  const Eigen::Index n = grid.n_cells();
  const VectorX<Scalar> w = grid.weights();
  PlainOf<DerivedF> out = PlainOf<DerivedF>::Zero(f.rows(), f.cols());
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar face_v = (v(k, 0) + v(k + 1, 0)) / Scalar(2);
    const auto flux = (face_v >= Scalar(0) ? f.row(k) : f.row(k + 1)) * face_v;
    out.row(k) += flux / w[k];
    out.row(k + 1) -= flux / w[k + 1];
  }
  return out;
}

/// Dual-cell divergence of v with the end faces at the end-node values:
/// (v_{k+1/2} - v_{k-1/2}) / w_k. Its weighted sum telescopes to v_n - v_0.
template <typename Scalar, typename Derived>
PlainOf<Derived> conservative_divergence(const GridT<Scalar>& grid, const Eigen::MatrixBase<Derived>& v) {
  grid.check(v, "velocity");
  const Eigen::Index n = grid.n_cells();
  const VectorX<Scalar> w = grid.weights();
  PlainOf<Derived> out(v.rows(), v.cols());
  for (Eigen::Index k = 0; k <= n; ++k) {
    const auto left = k > 0 ? ((v.row(k - 1) + v.row(k)) / Scalar(2)).eval() : v.row(0).eval();
    const auto right = k < n ? ((v.row(k) + v.row(k + 1)) / Scalar(2)).eval() : v.row(n).eval();
    out.row(k) = (right - left) / w[k];
  }
  return out;
}

/// Piecewise-linear interpolation of column data sampled at increasing
/// abscissae `at` onto the points `to` (also increasing). Points outside the
/// range are clamped to the end values.
template <typename Scalar, typename DerivedA, typename DerivedT, typename DerivedF>
MatrixX<Scalar> interpolate_linear(const Eigen::MatrixBase<DerivedA>& at, const Eigen::MatrixBase<DerivedF>& values,
                                   const Eigen::MatrixBase<DerivedT>& to) {
  if (at.size() != values.rows()) throw ShapeError("interpolate_linear: abscissae and values differ in length");
  const Eigen::Index m = at.size();
  MatrixX<Scalar> out(to.size(), values.cols());
  Eigen::Index j = 0;
  for (Eigen::Index k = 0; k < to.size(); ++k) {
    const Scalar x = to(k);
    if (x <= at(0)) {
      out.row(k) = values.row(0);
      continue;
    }
    if (x >= at(m - 1)) {
      out.row(k) = values.row(m - 1);
      continue;
    }
    while (j + 1 < m - 1 && at(j + 1) <= x) ++j;
    while (j > 0 && at(j) > x) --j;
    const Scalar theta = (x - at(j)) / (at(j + 1) - at(j));
    out.row(k) = (Scalar(1) - theta) * values.row(j) + theta * values.row(j + 1);
  }
  return out;
}

}  // namespace multifluid
