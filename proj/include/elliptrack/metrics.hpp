#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "elliptrack/errors.hpp"
#include "elliptrack/linalg.hpp"
#include "elliptrack/mem.hpp"

namespace elliptrack {

// An elliptical density summarized by its center and extent matrix.
struct Ellipse {
  Vec<2> center;
  Mat<2> extent;
};

// Extent matrix of an oriented ellipse: Sigma = S(p) S(p)^T, with
// eigenvalues l1^2 and l2^2.
inline Mat<2> extent_matrix(const ShapeParams& p) {
  validate(p);
  const Mat<2> s = shape_matrix(p);
  return symmetrized(s * s.transpose());
}

namespace detail {

inline void check_extent(const Mat<2>& extent, const char* which) {
  if (!approximately_symmetric(extent) || !(extent(0, 0) > 0.0) || !(extent.determinant() > 0.0)) {
    throw ContractViolation(std::string("extent matrix of ") + which +
                            " ellipse must be symmetric positive definite");
  }
}

}  // namespace detail

// Gauss-Wasserstein distance between two elliptical densities:
//   d^2 = |c1 - c2|^2 + tr{S1 + S2 - 2 (sqrt(S1) S2 sqrt(S1))^(1/2)}.
// The cross term is evaluated through 2x2 trace/determinant identities
// (tr and det of sqrt(S1) S2 sqrt(S1) are tr(S1 S2) and det(S1) det(S2),
// and tr{sqrt(M)} = sqrt(tr M + 2 sqrt(det M))), which avoids forming any
// matrix square root and keeps the cancellation error small for
// near-identical extents.  The trace term is clamped at zero against
// rounding.
inline double gw_distance(const Ellipse& a, const Ellipse& b) {
  detail::check_extent(a.extent, "first");
  detail::check_extent(b.extent, "second");

  // Identical inputs are exactly at distance zero; skipping the general
  // path avoids returning cancellation noise for them.
  if ((a.center.array() == b.center.array()).all() &&
      (a.extent.array() == b.extent.array()).all()) {
    return 0.0;
  }

  const double product_trace = (a.extent * b.extent).trace();
  const double product_det = a.extent.determinant() * b.extent.determinant();
  const double cross_trace =
      std::sqrt(std::max(0.0, product_trace + 2.0 * std::sqrt(std::max(0.0, product_det))));
  const double trace_term =
      std::max(0.0, a.extent.trace() + b.extent.trace() - 2.0 * cross_trace);
  return std::sqrt((a.center - b.center).squaredNorm() + trace_term);
}

}  // namespace elliptrack
