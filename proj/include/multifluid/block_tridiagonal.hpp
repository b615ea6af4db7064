#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

#include "multifluid/errors.hpp"
#include "multifluid/grid.hpp"

namespace multifluid {

/// Block-tridiagonal matrix with square blocks of a common size. Row k is
/// lower[k] x_{k-1} + diagonal[k] x_k + upper[k] x_{k+1}; lower[0] and
/// upper.back() are ignored.
template <typename Scalar>
struct BlockTridiagonalT {
  std::vector<MatrixX<Scalar>> lower;
  std::vector<MatrixX<Scalar>> diagonal;
  std::vector<MatrixX<Scalar>> upper;

  BlockTridiagonalT() = default;
  BlockTridiagonalT(Eigen::Index blocks, Eigen::Index block_size)
      : lower(blocks, MatrixX<Scalar>::Zero(block_size, block_size)),
        diagonal(blocks, MatrixX<Scalar>::Zero(block_size, block_size)),
        upper(blocks, MatrixX<Scalar>::Zero(block_size, block_size)) {}

  Eigen::Index blocks() const { return Eigen::Index(diagonal.size()); }
  Eigen::Index block_size() const { return diagonal.empty() ? 0 : diagonal.front().rows(); }

  /// Dense product, for checking residuals. Row k of x is block k.
  template <typename Derived>
  MatrixX<Scalar> apply(const Eigen::MatrixBase<Derived>& x) const {
    const Eigen::Index m = blocks();
    MatrixX<Scalar> out(m, block_size());
    for (Eigen::Index k = 0; k < m; ++k) {
      VectorX<Scalar> row = diagonal[k] * x.row(k).transpose();
      if (k > 0) row += lower[k] * x.row(k - 1).transpose();
      if (k + 1 < m) row += upper[k] * x.row(k + 1).transpose();
      out.row(k) = row.transpose();
    }
    return out;
  }
};

using BlockTridiagonal = BlockTridiagonalT<double>;

/// Block Thomas elimination. `rhs` holds one block right-hand side per row;
/// the solution has the same layout. Each Schur-complement pivot is factored
/// by partial-pivoting LU; a pivot whose reciprocal condition number falls to
/// rounding level raises SingularPivotError.
template <typename Scalar, typename Derived>
MatrixX<Scalar> solve_block_thomas(const BlockTridiagonalT<Scalar>& system, const Eigen::MatrixBase<Derived>& rhs) {
  const Eigen::Index m = system.blocks();
  const Eigen::Index b = system.block_size();
  if (m == 0) return MatrixX<Scalar>(0, rhs.cols());
  if (rhs.rows() != m || rhs.cols() != b || Eigen::Index(system.lower.size()) != m ||
      Eigen::Index(system.upper.size()) != m) {
    throw ShapeError("solve_block_thomas: right-hand side does not match the block structure");
  }

  std::vector<MatrixX<Scalar>> upper_eliminated(m);
  MatrixX<Scalar> rhs_eliminated(m, b);
  const Scalar tiny = Scalar(16) * std::numeric_limits<Scalar>::epsilon();

  for (Eigen::Index k = 0; k < m; ++k) {
    MatrixX<Scalar> pivot = system.diagonal[k];
    VectorX<Scalar> r = rhs.row(k).transpose();
    if (k > 0) {
      pivot.noalias() -= system.lower[k] * upper_eliminated[k - 1];
      r.noalias() -= system.lower[k] * rhs_eliminated.row(k - 1).transpose();
    }
    const Eigen::PartialPivLU<MatrixX<Scalar>> lu(pivot);
    const Scalar rcond = lu.rcond();
    if (!(rcond > tiny)) throw SingularPivotError("block Thomas: singular pivot block", long(k));
    if (k + 1 < m) upper_eliminated[k] = lu.solve(system.upper[k]);
    rhs_eliminated.row(k) = lu.solve(r).transpose();
  }

  MatrixX<Scalar> x(m, b);
  x.row(m - 1) = rhs_eliminated.row(m - 1);
  for (Eigen::Index k = m - 2; k >= 0; --k) {
    x.row(k) = rhs_eliminated.row(k) - (upper_eliminated[k] * x.row(k + 1).transpose()).transpose();
  }
  return x;
}

}  // namespace multifluid
