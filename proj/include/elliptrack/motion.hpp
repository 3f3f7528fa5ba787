#pragma once

#include <Eigen/Dense>

#include "elliptrack/errors.hpp"
#include "elliptrack/linalg.hpp"
#include "elliptrack/memekf_star.hpp"

namespace elliptrack {

// Nearly-constant-acceleration motion with white-noise jerk.  The shape is
// static in the mean; its covariance is inflated by a per-prediction amount.
struct MotionConfig {
  double dt = 10.0;
  double jerk_psd = 0.005;  // power spectral density of the jerk (m^2 s^-5)
  Mat<3> shape_process_noise = Mat<3>::Zero();
};

inline void validate(const MotionConfig& cfg) {
  if (!(cfg.dt >= 0.0)) {
    throw ContractViolation("prediction interval dt must be non-negative");
  }
  if (!(cfg.jerk_psd >= 0.0)) {
    throw ContractViolation("jerk_psd must be non-negative");
  }
}

// Block transition for the (x, y, vx, vy, ax, ay) ordering: per axis,
// position integrates velocity and half the acceleration, velocity
// integrates acceleration.
inline Mat<6> transition_matrix(double dt) {
  Mat<6> a = Mat<6>::Identity();
  for (int axis : {0, 1}) {
    const int pos = axis;
    const int vel = axis + 2;
    const int acc = axis + 4;
    a(pos, vel) = dt;
    a(pos, acc) = 0.5 * dt * dt;
    a(vel, acc) = dt;
  }
  return a;
}

// Exact covariance of integrated white-noise jerk over an interval dt.
inline Mat<6> process_noise(double dt, double jerk_psd) {
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  const double dt4 = dt3 * dt;
  const double dt5 = dt4 * dt;
  Mat<6> q = Mat<6>::Zero();
  for (int axis : {0, 1}) {
    const int pos = axis;
    const int vel = axis + 2;
    const int acc = axis + 4;
    q(pos, pos) = dt5 / 20.0;
    q(pos, vel) = q(vel, pos) = dt4 / 8.0;
    q(pos, acc) = q(acc, pos) = dt3 / 6.0;
    q(vel, vel) = dt3 / 3.0;
    q(vel, acc) = q(acc, vel) = dt2 / 2.0;
    q(acc, acc) = dt;
  }
  return jerk_psd * q;
}

inline TrackState predict(TrackState track, const MotionConfig& cfg) {
  validate(cfg);
  const Mat<6> a = transition_matrix(cfg.dt);
  track.kinematic.mean = a * track.kinematic.mean;
  track.kinematic.cov =
      symmetrized(a * track.kinematic.cov * a.transpose() + process_noise(cfg.dt, cfg.jerk_psd));
  track.shape.cov = symmetrized(track.shape.cov + cfg.shape_process_noise);
  return track;
}

}  // namespace elliptrack
