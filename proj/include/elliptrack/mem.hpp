#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <utility>

#include "elliptrack/errors.hpp"
#include "elliptrack/linalg.hpp"

namespace elliptrack {

// Elliptical extent parameters: orientation (rad) and semi-axis lengths (m).
struct ShapeParams {
  double alpha = 0.0;
  double l1 = 1.0;
  double l2 = 1.0;
};

inline void validate(const ShapeParams& p) {
  if (!(p.l1 > 0.0) || !(p.l2 > 0.0)) {
    throw ContractViolation("semi-axis lengths must be positive");
  }
}

inline Vec<3> to_vector(const ShapeParams& p) { return Vec<3>(p.alpha, p.l1, p.l2); }

inline ShapeParams shape_from_vector(const Vec<3>& v) { return ShapeParams{v[0], v[1], v[2]}; }

// Noise terms of the multiplicative error model
//   y = H r + S(p) h + v,   h ~ N(0, C_h),   v ~ N(0, C_v),
// where the multiplicative term scatters measurement sources over the
// extent and the additive term models sensor noise.
struct MemNoiseConfig {
  Mat<2> multiplicative_cov = 0.25 * Mat<2>::Identity();  // C_h
  Mat<2> additive_cov = Mat<2>::Identity();               // C_v
};

// Projection from the kinematic state (x, y, vx, vy, ax, ay) onto position.
inline Mat<2, 6> position_projection() {
  Mat<2, 6> h = Mat<2, 6>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  return h;
}

// S(p): maps unit-disk multiplicative noise onto the oriented ellipse.
inline Mat<2> shape_matrix(const ShapeParams& p) {
  validate(p);
  const double c = std::cos(p.alpha);
  const double s = std::sin(p.alpha);
  Mat<2> m;
  m << p.l1 * c, -p.l2 * s,
       p.l1 * s,  p.l2 * c;
  return m;
}

// Jacobians of the rows of S(p) with respect to (alpha, l1, l2): row r of Jn
// holds the partial derivatives of the r-th component of row n of S.
inline std::pair<Mat<2, 3>, Mat<2, 3>> shape_jacobians(const ShapeParams& p) {
  const double c = std::cos(p.alpha);
  const double s = std::sin(p.alpha);
  Mat<2, 3> j1;
  j1 << -p.l1 * s, c, 0.0,
        -p.l2 * c, 0.0, -s;
  Mat<2, 3> j2;
  j2 << p.l1 * c, s, 0.0,
        -p.l2 * s, 0.0, c;
  return {j1, j2};
}

// Row-major vectorization of a 2x2 matrix: (m11, m12, m21, m22).
inline Vec<4> vect(const Mat<2>& m) { return Vec<4>(m(0, 0), m(0, 1), m(1, 0), m(1, 1)); }

// F picks the (xx, yy, xy) components out of a row-major vectorized 2x2
// matrix; F~ picks (xx, yy, yx).
inline Mat<3, 4> pseudo_projection() {
  Mat<3, 4> f = Mat<3, 4>::Zero();
  f(0, 0) = 1.0;
  f(1, 3) = 1.0;
  f(2, 1) = 1.0;
  return f;
}

inline Mat<3, 4> pseudo_projection_transposed() {
  Mat<3, 4> f = Mat<3, 4>::Zero();
  f(0, 0) = 1.0;
  f(1, 3) = 1.0;
  f(2, 2) = 1.0;
  return f;
}

inline Mat<4> kron2(const Mat<2>& a, const Mat<2>& b) {
  Mat<4> k;
  k.block<2, 2>(0, 0) = a(0, 0) * b;
  k.block<2, 2>(0, 2) = a(0, 1) * b;
  k.block<2, 2>(2, 0) = a(1, 0) * b;
  k.block<2, 2>(2, 2) = a(1, 1) * b;
  return k;
}

// Quadratic outcome of a position residual: squared components and cross
// term, in the fixed (xx, yy, xy) order.
struct PseudoMeasurement {
  Vec<3> value;
};

inline PseudoMeasurement pseudo_outcome(const Vec<2>& measurement, const Vec<2>& expected) {
  const Vec<2> d = measurement - expected;
  return PseudoMeasurement{Vec<3>(d[0] * d[0], d[1] * d[1], d[0] * d[1])};
}

// Expectation of the quadratic outcome for a zero-mean Gaussian residual
// with the given covariance.
inline Vec<3> pseudo_expectation(const Mat<2>& residual_cov) {
  return Vec<3>(residual_cov(0, 0), residual_cov(1, 1), residual_cov(0, 1));
}

// Covariance of the quadratic outcome for a zero-mean Gaussian residual:
// the Gaussian fourth-moment identity F (C (x) C) (F + F~)^T.
inline Mat<3> pseudo_covariance(const Mat<2>& residual_cov) {
  const Mat<3, 4> f = pseudo_projection();
  const Mat<3, 4> ft = pseudo_projection_transposed();
  return symmetrized(f * kron2(residual_cov, residual_cov) * (f + ft).transpose());
}

// M(p, C_h): Jacobian of the expected quadratic outcome with respect to the
// shape parameters; rows follow the (xx, yy, xy) component order.
inline Mat<3> moment_matrix(const ShapeParams& p, const Mat<2>& multiplicative_cov) {
  const Mat<2> s = shape_matrix(p);
  const auto [j1, j2] = shape_jacobians(p);
  const Eigen::RowVector2d s1 = s.row(0);
  const Eigen::RowVector2d s2 = s.row(1);
  Mat<3> m;
  m.row(0) = 2.0 * s1 * multiplicative_cov * j1;
  m.row(1) = 2.0 * s2 * multiplicative_cov * j2;
  m.row(2) = s1 * multiplicative_cov * j2 + s2 * multiplicative_cov * j1;
  return m;
}

// Spread of the multiplicative noise through the estimated shape.  C_I is
// the contribution of the mean shape, C_II the extra spread induced by
// shape-parameter uncertainty: [C_II]_mn = tr{C_p J_n^T C_h J_m}.
inline std::pair<Mat<2>, Mat<2>> spread_covariances(const ShapeParams& p, const Mat<3>& shape_cov,
                                                    const Mat<2>& multiplicative_cov) {
  const Mat<2> s = shape_matrix(p);
  const auto [j1, j2] = shape_jacobians(p);
  const Mat<2> spread_mean = symmetrized(s * multiplicative_cov * s.transpose());
  const Mat<2, 3> jacobians[2] = {j1, j2};
  Mat<2> spread_param;
  for (int m = 0; m < 2; ++m) {
    for (int n = 0; n < 2; ++n) {
      spread_param(m, n) =
          (shape_cov * jacobians[n].transpose() * multiplicative_cov * jacobians[m]).trace();
    }
  }
  return {spread_mean, symmetrized(spread_param)};
}

// All shape-dependent helper quantities evaluated at one linearization point.
struct ShapeLinearization {
  Mat<2> S;
  Mat<2, 3> J1;
  Mat<2, 3> J2;
  Mat<3> M;
  Mat<2> CI;   // spread of the mean shape
  Mat<2> CII;  // spread from shape-parameter uncertainty

  Eigen::RowVector2d s1() const { return S.row(0); }
  Eigen::RowVector2d s2() const { return S.row(1); }
};

inline ShapeLinearization linearize_shape(const ShapeParams& p, const Mat<3>& shape_cov,
                                          const Mat<2>& multiplicative_cov) {
  validate(p);
  ShapeLinearization lin;
  lin.S = shape_matrix(p);
  std::tie(lin.J1, lin.J2) = shape_jacobians(p);
  lin.M = moment_matrix(p, multiplicative_cov);
  std::tie(lin.CI, lin.CII) = spread_covariances(p, shape_cov, multiplicative_cov);
  return lin;
}

}  // namespace elliptrack
