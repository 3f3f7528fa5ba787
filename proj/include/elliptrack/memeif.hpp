#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "elliptrack/errors.hpp"
#include "elliptrack/gaussian.hpp"
#include "elliptrack/linalg.hpp"
#include "elliptrack/mem.hpp"
#include "elliptrack/memekf_star.hpp"

namespace elliptrack {

enum class EifVariant { YL, Y0 };

struct BatchUpdateConfig {
  EifVariant variant = EifVariant::YL;
  int chunk_count = 1;        // used by the Y0 variant only
  double clamp_factor = 0.4;  // shape-variance cap as a fraction of the semi-axis estimate
};

inline void validate(const BatchUpdateConfig& cfg) {
  if (!(cfg.clamp_factor > 0.0) || cfg.clamp_factor > 1.0) {
    throw ContractViolation("clamp_factor must lie in (0, 1]");
  }
  if (cfg.chunk_count < 1) {
    throw ContractViolation("chunk_count must be at least 1");
  }
}

// Caps the semi-axis variances at (clamp_factor * semi-axis estimate)^2.  A
// clamped diagonal entry is set to its bound exactly; the corresponding row
// and column scale by the square root of the diagonal scaling, which leaves
// all correlation coefficients (and positive definiteness) intact.
inline void clamp_shape_covariance(TrackState& track, double clamp_factor) {
  Mat<3>& cov = track.shape.cov;
  double bound[3] = {0.0, 0.0, 0.0};
  double root_scale[3] = {1.0, 1.0, 1.0};
  bool clamped[3] = {false, false, false};
  for (int k : {1, 2}) {
    const double axis = track.shape.mean[k];
    const double cap = (clamp_factor * axis) * (clamp_factor * axis);
    if (cov(k, k) > cap) {
      clamped[k] = true;
      bound[k] = cap;
      root_scale[k] = std::sqrt(cap / cov(k, k));
    }
  }
  if (!clamped[1] && !clamped[2]) {
    return;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      if (i == j) {
        if (clamped[i]) cov(i, i) = bound[i];
      } else {
        cov(i, j) *= root_scale[i] * root_scale[j];
        cov(j, i) = cov(i, j);
      }
    }
  }
}

namespace detail {

// Kinematic information-form batch step.  `weight_total` plays the role of
// the measurement count and `weighted_sum` of the plain measurement sum; the
// unweighted variants pass the count and the pairwise sum of the batch.
inline GaussianState<6> kinematic_information_step(const GaussianState<6>& prior,
                                                   const Mat<2>& effective_noise,
                                                   const Vec<2>& weighted_sum,
                                                   double weight_total) {
  const Mat<2, 6> h = position_projection();

  InformationState<6> info;
  try {
    info = to_information(prior);
  } catch (const SingularMatrixError&) {
    throw SingularMatrixError("prior kinematic covariance");
  }

  const Mat<2, 6> noise_solved_h = spd_solve(effective_noise, h, "effective measurement noise");
  info.info_vector += noise_solved_h.transpose() * weighted_sum;
  info.info_matrix =
      symmetrized(info.info_matrix + weight_total * (noise_solved_h.transpose() * h));

  try {
    return from_information(info);
  } catch (const SingularMatrixError&) {
    throw SingularMatrixError("kinematic information matrix");
  }
}

// Shape information-form batch step.  `expected` and `residual_cov` describe
// a single measurement at the chosen kinematic reference (start-of-chunk for
// the y0 variant, end-of-batch for y_L); `weights` may be empty for the
// unweighted case.
inline GaussianState<3> shape_information_step(const GaussianState<3>& prior,
                                               const ShapeLinearization& lin,
                                               const Mat<2>& residual_cov, const Vec<2>& expected,
                                               std::span<const Vec<2>> points,
                                               std::span<const double> weights,
                                               double weight_total) {
  const Vec<3> outcome_mean = pseudo_expectation(residual_cov);
  const Mat<3> outcome_cov = pseudo_covariance(residual_cov);

  // Centered pseudo-measurement covariance.  A linearization far from the
  // truth can push it indefinite; repair by eigenvalue flooring and report.
  Mat<3> centered = symmetrized(outcome_cov - lin.M * prior.cov * lin.M.transpose());
  const double floor_value = 1e-9 * outcome_cov.trace();
  if (floor_eigenvalues(centered, floor_value)) {
    emit_warning(
        "degenerate linearization: centered pseudo-measurement covariance repaired by "
        "eigenvalue flooring");
  }

  InformationState<3> info;
  try {
    info = to_information(prior);
  } catch (const SingularMatrixError&) {
    throw SingularMatrixError("prior shape covariance");
  }

  const Mat<3> centered_solved_m =
      spd_solve(centered, lin.M, "centered pseudo-measurement covariance");
  const Vec<3> outcome_sum =
      weights.empty()
          ? pairwise_sum(0, points.size(),
                         [&](std::size_t i) -> Vec<3> {
                           return pseudo_outcome(points[i], expected).value;
                         })
          : pairwise_sum(0, points.size(), [&](std::size_t i) -> Vec<3> {
              return weights[i] * pseudo_outcome(points[i], expected).value;
            });

  info.info_vector += centered_solved_m.transpose() *
                      (outcome_sum - weight_total * outcome_mean +
                       weight_total * (lin.M * prior.mean));
  info.info_matrix =
      symmetrized(info.info_matrix + weight_total * (lin.M.transpose() * centered_solved_m));

  try {
    return from_information(info);
  } catch (const SingularMatrixError&) {
    throw SingularMatrixError("shape information matrix");
  }
}

// Shared core of the batch updates: one information-form pass over `points`
// with all helper quantities linearized at the current track estimate.  The
// shape step references the start-of-chunk kinematics when
// `shape_reference_at_start` is set and the updated kinematics otherwise.
inline void eif_pass(TrackState& track, std::span<const Vec<2>> points,
                     std::span<const double> weights, double weight_total,
                     const MemNoiseConfig& noise, bool shape_reference_at_start) {
  const Mat<2, 6> h = position_projection();
  const ShapeLinearization lin =
      linearize_shape(shape_params(track), track.shape.cov, noise.multiplicative_cov);
  const Mat<2> effective_noise = symmetrized(lin.CI + lin.CII + noise.additive_cov);

  const Vec<2> point_sum =
      weights.empty()
          ? pairwise_sum(0, points.size(), [&](std::size_t i) -> Vec<2> { return points[i]; })
          : pairwise_sum(0, points.size(),
                         [&](std::size_t i) -> Vec<2> { return weights[i] * points[i]; });

  const GaussianState<6> kinematic_start = track.kinematic;
  track.kinematic =
      detail::kinematic_information_step(kinematic_start, effective_noise, point_sum, weight_total);

  const GaussianState<6>& reference =
      shape_reference_at_start ? kinematic_start : track.kinematic;
  const Vec<2> expected = h * reference.mean;
  const Mat<2> residual_cov =
      symmetrized(h * reference.cov * h.transpose()) + effective_noise;
  track.shape = detail::shape_information_step(track.shape, lin, residual_cov, expected, points,
                                               weights, weight_total);
  floor_semi_axes(track);
}

}  // namespace detail

// Batch information-filter update linearized once at the scan prior; the
// shape step is formed against the batch-updated kinematic estimate.
inline TrackState batch_update_yl(TrackState track, const MeasurementBatch& batch,
                                  const MemNoiseConfig& noise,
                                  const BatchUpdateConfig& cfg = {}) {
  validate(cfg);
  validate(shape_params(track));
  if (batch.points.empty()) {
    return track;
  }
  detail::eif_pass(track, batch.points, {}, static_cast<double>(batch.points.size()), noise,
                   /*shape_reference_at_start=*/false);
  clamp_shape_covariance(track, cfg.clamp_factor);
  return track;
}

// Chunked batch update: the scan is split into cfg.chunk_count contiguous
// chunks of near-equal size (larger chunks first) and each chunk runs one
// information-form pass relinearized at the then-current estimate, with the
// shape step referencing the start-of-chunk kinematics.  One chunk per
// measurement reproduces the sequential update.
inline TrackState batch_update_y0(TrackState track, const MeasurementBatch& batch,
                                  const MemNoiseConfig& noise,
                                  const BatchUpdateConfig& cfg = {}) {
  validate(cfg);
  validate(shape_params(track));
  const std::size_t total = batch.points.size();
  if (total == 0) {
    return track;
  }
  const std::size_t chunk_count = std::min<std::size_t>(cfg.chunk_count, total);
  const std::size_t base_size = total / chunk_count;
  const std::size_t oversized = total % chunk_count;
  std::size_t begin = 0;
  for (std::size_t c = 0; c < chunk_count; ++c) {
    const std::size_t size = base_size + (c < oversized ? 1 : 0);
    const std::span<const Vec<2>> chunk(batch.points.data() + begin, size);
    begin += size;
    detail::eif_pass(track, chunk, {}, static_cast<double>(size), noise,
                     /*shape_reference_at_start=*/true);
  }
  clamp_shape_covariance(track, cfg.clamp_factor);
  return track;
}

// Weighted single-linearization batch update: every sum over the batch uses
// the per-measurement weights and the total weight W replaces the
// measurement count.  All-zero weights return the track unchanged.
inline TrackState weighted_batch_update_yl(TrackState track, const MeasurementBatch& batch,
                                           const std::vector<double>& weights,
                                           const MemNoiseConfig& noise,
                                           const BatchUpdateConfig& cfg = {}) {
  validate(cfg);
  validate(shape_params(track));
  if (weights.size() != batch.points.size()) {
    throw ContractViolation("one weight per measurement is required");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ContractViolation("weights must be finite and non-negative");
    }
  }
  if (batch.points.empty()) {
    return track;
  }
  const double weight_total =
      pairwise_sum(0, weights.size(), [&](std::size_t i) -> double { return weights[i]; });
  if (weight_total == 0.0) {
    return track;
  }
  detail::eif_pass(track, batch.points, weights, weight_total, noise,
                   /*shape_reference_at_start=*/false);
  clamp_shape_covariance(track, cfg.clamp_factor);
  return track;
}

}  // namespace elliptrack
