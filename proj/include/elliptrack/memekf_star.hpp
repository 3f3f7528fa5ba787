#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "elliptrack/errors.hpp"
#include "elliptrack/gaussian.hpp"
#include "elliptrack/linalg.hpp"
#include "elliptrack/mem.hpp"
#include "elliptrack/metrics.hpp"

namespace elliptrack {

// Joint elliptical track belief: kinematics (x, y, vx, vy, ax, ay) and shape
// (alpha, l1, l2) kept as separate Gaussian factors.
struct TrackState {
  GaussianState<6> kinematic;
  GaussianState<3> shape;
};

// One scan worth of position measurements.
struct MeasurementBatch {
  std::vector<Vec<2>> points;
  int scan_index = 0;
};

inline ShapeParams shape_params(const TrackState& track) {
  return shape_from_vector(track.shape.mean);
}

inline Ellipse track_ellipse(const TrackState& track) {
  return Ellipse{position_projection() * track.kinematic.mean,
                 extent_matrix(shape_params(track))};
}

// Smallest admissible semi-axis estimate.  Shape means are floored here
// after every shape update so the linearization can never degenerate.
inline constexpr double kMinSemiAxis = 0.1;

inline void floor_semi_axes(TrackState& track) {
  track.shape.mean[1] = std::max(track.shape.mean[1], kMinSemiAxis);
  track.shape.mean[2] = std::max(track.shape.mean[2], kMinSemiAxis);
}

namespace detail {

// Folds one measurement into the track: a moment-form kinematic update
// followed by the shape update, both linearized at the pre-update estimate.
inline void sequential_step(TrackState& track, const Vec<2>& y, const MemNoiseConfig& noise,
                            std::size_t index) {
  try {
    const ShapeLinearization lin =
        linearize_shape(shape_params(track), track.shape.cov, noise.multiplicative_cov);
    const Mat<2, 6> h = position_projection();

    // Expected measurement and its covariance at the pre-update estimate;
    // the shape step below is formed against these same quantities.
    const Vec<2> expected = h * track.kinematic.mean;
    const Mat<2> effective_noise = symmetrized(lin.CI + lin.CII + noise.additive_cov);
    const Mat<2> residual_cov =
        symmetrized(h * track.kinematic.cov * h.transpose()) + effective_noise;

    track.kinematic =
        kalman_update(track.kinematic, LinearMeasurementModel<2, 6>{h, effective_noise}, y);

    const Vec<3> outcome = pseudo_outcome(y, expected).value;
    const Vec<3> outcome_mean = pseudo_expectation(residual_cov);
    const Mat<3> outcome_cov = pseudo_covariance(residual_cov);
    const Mat<3> cross_cov = track.shape.cov * lin.M.transpose();
    const Mat<3> gain =
        spd_solve(outcome_cov, Mat<3>(cross_cov.transpose()), "pseudo-measurement covariance")
            .transpose();
    track.shape.mean += gain * (outcome - outcome_mean);
    track.shape.cov = symmetrized(track.shape.cov - gain * outcome_cov * gain.transpose());
    floor_semi_axes(track);
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(e.matrix_name(), "measurement " + std::to_string(index));
  }
}

}  // namespace detail

// Sequential per-measurement update: measurements are folded in one at a
// time, relinearizing the shape-dependent quantities before each step.  An
// empty batch returns the track unchanged.
inline TrackState sequential_update(TrackState track, const MeasurementBatch& batch,
                                    const MemNoiseConfig& noise) {
  validate(shape_params(track));
  for (std::size_t i = 0; i < batch.points.size(); ++i) {
    detail::sequential_step(track, batch.points[i], noise, i);
  }
  return track;
}

// Diagnostic: how much the sequential result depends on measurement order,
// quantified as the Gauss-Wasserstein distance between the estimates
// produced by processing the batch forwards and backwards.
inline double order_sensitivity_probe(const TrackState& track, const MeasurementBatch& batch,
                                      const MemNoiseConfig& noise) {
  const TrackState forward = sequential_update(track, batch, noise);
  MeasurementBatch reversed = batch;
  std::reverse(reversed.points.begin(), reversed.points.end());
  const TrackState backward = sequential_update(track, reversed, noise);
  return gw_distance(track_ellipse(forward), track_ellipse(backward));
}

}  // namespace elliptrack
