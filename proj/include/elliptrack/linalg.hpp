#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <utility>

#include "elliptrack/errors.hpp"

namespace elliptrack {

template <int Rows, int Cols = Rows>
using Mat = Eigen::Matrix<double, Rows, Cols>;

template <int Rows>
using Vec = Eigen::Matrix<double, Rows, 1>;

using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// A factorization pivot smaller than this fraction of the largest pivot
// marks the matrix as numerically singular.
inline constexpr double kSingularPivotRatio = 1e-12;

template <class Derived>
typename Derived::PlainObject symmetrized(const Eigen::MatrixBase<Derived>& m) {
  return 0.5 * (m + m.transpose());
}

template <class Derived>
bool approximately_symmetric(const Eigen::MatrixBase<Derived>& m, double tol = 1e-9) {
  const double scale = m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, scale);
}

// Robust LDLT factorization of a symmetric positive-definite matrix.  Throws
// SingularMatrixError named after `name` when the matrix fails to factorize,
// has a non-positive pivot, or violates the pivot-ratio guard.
template <class Derived>
Eigen::LDLT<typename Derived::PlainObject> spd_factorize(const Eigen::MatrixBase<Derived>& a,
                                                         const char* name) {
  Eigen::LDLT<typename Derived::PlainObject> ldlt(a.derived());
  if (ldlt.info() != Eigen::Success) {
    throw SingularMatrixError(name);
  }
  const auto& pivots = ldlt.vectorD();
  const double largest = pivots.maxCoeff();
  const double smallest = pivots.minCoeff();
  if (!(smallest > 0.0) || smallest < kSingularPivotRatio * largest) {
    throw SingularMatrixError(name);
  }
  return ldlt;
}

// Solves a x = b for symmetric positive-definite a.
template <class DerivedA, class DerivedB>
typename DerivedB::PlainObject spd_solve(const Eigen::MatrixBase<DerivedA>& a,
                                         const Eigen::MatrixBase<DerivedB>& b,
                                         const char* name) {
  return spd_factorize(a, name).solve(b.derived());
}

template <class Derived>
typename Derived::PlainObject spd_inverse(const Eigen::MatrixBase<Derived>& a, const char* name) {
  using Plain = typename Derived::PlainObject;
  const auto ldlt = spd_factorize(a, name);
  const Plain identity = Plain::Identity(a.rows(), a.cols());
  return symmetrized(ldlt.solve(identity));
}

// Closed-form principal square root of a symmetric positive-(semi)definite
// 2x2 matrix: sqrt(A) = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A)).
inline Mat<2> sqrt_spd_2x2(const Mat<2>& a) {
  const double root_det = std::sqrt(std::max(a.determinant(), 0.0));
  const double tau = a.trace() + 2.0 * root_det;
  if (!(tau > 0.0)) {
    throw SingularMatrixError("2x2 square-root argument");
  }
  return (a + root_det * Mat<2>::Identity()) / std::sqrt(tau);
}

// Floors the eigenvalues of a symmetric matrix at `floor_value` (projection
// to the nearest positive-definite matrix in the Frobenius norm).  Returns
// true when a repair was necessary.
template <int N>
bool floor_eigenvalues(Mat<N>& m, double floor_value) {
  Eigen::SelfAdjointEigenSolver<Mat<N>> solver(m);
  if (solver.eigenvalues().minCoeff() >= floor_value) {
    return false;
  }
  const Vec<N> floored = solver.eigenvalues().cwiseMax(floor_value);
  m = symmetrized(solver.eigenvectors() * floored.asDiagonal() * solver.eigenvectors().transpose());
  return true;
}

// Pairwise (tree) summation of term(first), ..., term(last - 1).  Keeps the
// rounding error logarithmic in the number of terms, which in turn keeps
// results stable under permutations of the inputs.  `term` must return a
// value type (double or a plain Eigen vector/matrix); `last > first`.
template <class Term>
auto pairwise_sum(std::size_t first, std::size_t last, Term&& term)
    -> std::decay_t<decltype(term(std::size_t{0}))> {
  using Result = std::decay_t<decltype(term(std::size_t{0}))>;
  const std::size_t count = last - first;
  if (count <= 8) {
    Result acc = term(first);
    for (std::size_t i = first + 1; i < last; ++i) {
      acc += term(i);
    }
    return acc;
  }
  const std::size_t mid = first + count / 2;
  Result acc = pairwise_sum(first, mid, term);
  acc += pairwise_sum(mid, last, term);
  return acc;
}

}  // namespace elliptrack
