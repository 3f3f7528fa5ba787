// Independent reference implementations used as oracles by the test suites.
//
// Everything here is transcribed directly from the update equations as
// straight-line code: explicit matrix inverses, hand-built projection and
// Jacobian matrices, plain loops for sums.  Nothing is shared with the
// library internals beyond the public Track/Batch containers, so agreement
// between the two is meaningful evidence rather than a tautology.
#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "elliptrack/memekf_star.hpp"

namespace naive {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

inline Matrix2d shape_matrix(const Vector3d& p) {
  const double c = std::cos(p(0)), s = std::sin(p(0));
  Matrix2d m;
  m << p(1) * c, -p(2) * s, p(1) * s, p(2) * c;
  return m;
}

inline Eigen::Matrix<double, 2, 3> jacobian1(const Vector3d& p) {
  const double c = std::cos(p(0)), s = std::sin(p(0));
  Eigen::Matrix<double, 2, 3> j;
  j << -p(1) * s, c, 0.0, -p(2) * c, 0.0, -s;
  return j;
}

inline Eigen::Matrix<double, 2, 3> jacobian2(const Vector3d& p) {
  const double c = std::cos(p(0)), s = std::sin(p(0));
  Eigen::Matrix<double, 2, 3> j;
  j << p(1) * c, s, 0.0, -p(2) * s, 0.0, c;
  return j;
}

inline Eigen::Matrix<double, 3, 4> pick_f() {
  Eigen::Matrix<double, 3, 4> f = Eigen::Matrix<double, 3, 4>::Zero();
  f(0, 0) = 1.0;
  f(1, 3) = 1.0;
  f(2, 1) = 1.0;
  return f;
}

inline Eigen::Matrix<double, 3, 4> pick_f_tilde() {
  Eigen::Matrix<double, 3, 4> f = Eigen::Matrix<double, 3, 4>::Zero();
  f(0, 0) = 1.0;
  f(1, 3) = 1.0;
  f(2, 2) = 1.0;
  return f;
}

inline Eigen::Vector4d vect(const Matrix2d& m) {
  return Eigen::Vector4d(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
}

inline Eigen::Matrix4d kron2(const Matrix2d& a, const Matrix2d& b) {
  Eigen::Matrix4d k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) k(2 * i + r, 2 * j + c) = a(i, j) * b(r, c);
  return k;
}

// Closed-form fourth-moment covariance of (z1^2, z2^2, z1 z2) for
// z ~ N(0, C), derived from Isserlis' theorem.
inline Matrix3d closed_form_pseudo_covariance(const Matrix2d& c) {
  const double c11 = c(0, 0), c22 = c(1, 1), c12 = c(0, 1);
  Matrix3d out;
  out << 2.0 * c11 * c11, 2.0 * c12 * c12, 2.0 * c11 * c12,
      2.0 * c12 * c12, 2.0 * c22 * c22, 2.0 * c12 * c22,
      2.0 * c11 * c12, 2.0 * c12 * c22, c11 * c22 + c12 * c12;
  return out;
}

inline Matrix3d moment_matrix(const Vector3d& p, const Matrix2d& ch) {
  const Matrix2d s = shape_matrix(p);
  const Eigen::RowVector2d s1 = s.row(0), s2 = s.row(1);
  const auto j1 = jacobian1(p), j2 = jacobian2(p);
  Matrix3d m;
  m.row(0) = 2.0 * s1 * ch * j1;
  m.row(1) = 2.0 * s2 * ch * j2;
  m.row(2) = s1 * ch * j2 + s2 * ch * j1;
  return m;
}

inline Matrix2d spread_i(const Vector3d& p, const Matrix2d& ch) {
  const Matrix2d s = shape_matrix(p);
  return s * ch * s.transpose();
}

inline Matrix2d spread_ii(const Vector3d& p, const Matrix3d& cp,
                          const Matrix2d& ch) {
  const Eigen::Matrix<double, 2, 3> j[2] = {jacobian1(p), jacobian2(p)};
  Matrix2d out;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n)
      out(m, n) = (cp * j[n].transpose() * ch * j[m]).trace();
  return out;
}

inline Eigen::Matrix<double, 2, 6> pick_h() {
  Eigen::Matrix<double, 2, 6> h = Eigen::Matrix<double, 2, 6>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  return h;
}

inline void floor_axes(Vector3d& p, double floor_value = 0.1) {
  p(1) = std::max(p(1), floor_value);
  p(2) = std::max(p(2), floor_value);
}

// Sequential MEM-EKF* measurement loop, one Kalman-form update per point,
// shape pseudo-measurement built from the pre-update predicted position.
inline elliptrack::TrackState sequential(const elliptrack::TrackState& prior,
                                         const std::vector<elliptrack::Vec<2>>& points,
                                         const Matrix2d& ch, const Matrix2d& cv) {
  const auto h = pick_h();
  const auto f = pick_f();
  const auto f_tilde = pick_f_tilde();

  Eigen::Matrix<double, 6, 1> r = prior.kinematic.mean;
  Eigen::Matrix<double, 6, 6> cr = prior.kinematic.cov;
  Vector3d p = prior.shape.mean;
  Matrix3d cp = prior.shape.cov;

  for (const auto& y : points) {
    const Matrix2d s = shape_matrix(p);
    const Eigen::RowVector2d s1 = s.row(0), s2 = s.row(1);
    const auto j1 = jacobian1(p), j2 = jacobian2(p);

    const Matrix2d ci = s * ch * s.transpose();
    const Matrix2d cii = spread_ii(p, cp, ch);

    const Vector2d ybar = h * r;
    const Matrix2d cy = h * cr * h.transpose() + ci + cii + cv;
    const Eigen::Matrix<double, 6, 2> cry = cr * h.transpose();
    const Eigen::Matrix<double, 6, 2> kr = cry * cy.inverse();
    r = r + kr * (y - ybar);
    cr = cr - kr * cy * kr.transpose();

    Matrix3d m;
    m.row(0) = 2.0 * s1 * ch * j1;
    m.row(1) = 2.0 * s2 * ch * j2;
    m.row(2) = s1 * ch * j2 + s2 * ch * j1;

    const Vector2d d = y - ybar;
    const Vector3d pseudo = f * vect(d * d.transpose());
    const Vector3d pseudo_bar = f * vect(cy);
    const Matrix3d cyy =
        f * kron2(cy, cy) * (f + f_tilde).transpose();
    const Eigen::Matrix<double, 3, 3> cpy = cp * m.transpose();
    const Matrix3d kp = cpy * cyy.inverse();
    p = p + kp * (pseudo - pseudo_bar);
    cp = cp - kp * cyy * kp.transpose();
    floor_axes(p);
  }

  elliptrack::TrackState out;
  out.kinematic.mean = r;
  out.kinematic.cov = cr;
  out.shape.mean = p;
  out.shape.cov = cp;
  return out;
}

// Batch information-form update linearised once at the prior (the y_L
// variant): kinematics first in information space, then the shape update
// against residuals about the refreshed position estimate.
inline elliptrack::TrackState batch_yl(const elliptrack::TrackState& prior,
                                       const std::vector<elliptrack::Vec<2>>& points,
                                       const Matrix2d& ch, const Matrix2d& cv) {
  if (points.empty()) return prior;
  const auto h = pick_h();
  const auto f = pick_f();
  const auto f_tilde = pick_f_tilde();
  const double count = static_cast<double>(points.size());

  const Vector3d p0 = prior.shape.mean;
  const Matrix3d cp0 = prior.shape.cov;
  const Matrix2d ci = spread_i(p0, ch);
  const Matrix2d cii = spread_ii(p0, cp0, ch);
  const Matrix3d m = moment_matrix(p0, ch);

  // Kinematic information update with the shared effective noise.
  const Matrix2d cs = ci + cii + cv;
  const Matrix2d cs_inv = cs.inverse();
  Vector2d sum_y = Vector2d::Zero();
  for (const auto& y : points) sum_y += y;

  const Eigen::Matrix<double, 6, 6> lambda0 = prior.kinematic.cov.inverse();
  const Eigen::Matrix<double, 6, 1> xi0 = lambda0 * prior.kinematic.mean;
  const Eigen::Matrix<double, 6, 1> xi_l = xi0 + h.transpose() * cs_inv * sum_y;
  const Eigen::Matrix<double, 6, 6> lambda_l =
      lambda0 + count * h.transpose() * cs_inv * h;
  const Eigen::Matrix<double, 6, 6> cr_l = lambda_l.inverse();
  const Eigen::Matrix<double, 6, 1> r_l = cr_l * xi_l;

  // Shape information update, residuals about the updated position.
  const Vector2d ybar = h * r_l;
  const Matrix2d cy = h * cr_l * h.transpose() + ci + cii + cv;
  const Vector3d pseudo_bar = f * vect(cy);
  const Matrix3d cyy = f * kron2(cy, cy) * (f + f_tilde).transpose();
  const Matrix3d ct = cyy - m * cp0 * m.transpose();
  const Matrix3d ct_inv = ct.inverse();

  Vector3d sum_pseudo = Vector3d::Zero();
  for (const auto& y : points) {
    const Vector2d d = y - ybar;
    sum_pseudo += f * vect(d * d.transpose());
  }

  const Matrix3d lambda_p0 = cp0.inverse();
  const Vector3d xi_p =
      lambda_p0 * p0 +
      m.transpose() * ct_inv * (sum_pseudo - count * pseudo_bar + count * m * p0);
  const Matrix3d lambda_p = lambda_p0 + count * m.transpose() * ct_inv * m;
  const Matrix3d cp_l = lambda_p.inverse();
  Vector3d p_l = cp_l * xi_p;
  floor_axes(p_l);

  elliptrack::TrackState out;
  out.kinematic.mean = r_l;
  out.kinematic.cov = cr_l;
  out.shape.mean = p_l;
  out.shape.cov = cp_l;
  return out;
}

// Matrix square root through an eigendecomposition; oracle for the
// closed-form metric path.
inline Matrix2d sqrtm(const Matrix2d& a) {
  Eigen::SelfAdjointEigenSolver<Matrix2d> solver(a);
  return solver.eigenvectors() *
         solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         solver.eigenvectors().transpose();
}

inline double gw_distance(const Vector2d& c1, const Matrix2d& s1,
                          const Vector2d& c2, const Matrix2d& s2) {
  const Matrix2d root = sqrtm(s1);
  const Matrix2d inner = root * s2 * root;
  const double trace_term =
      s1.trace() + s2.trace() - 2.0 * sqrtm(0.5 * (inner + inner.transpose())).trace();
  return std::sqrt((c1 - c2).squaredNorm() + std::max(0.0, trace_term));
}

}  // namespace naive
