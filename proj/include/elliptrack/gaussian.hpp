#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "elliptrack/errors.hpp"
#include "elliptrack/linalg.hpp"

namespace elliptrack {

// Gaussian belief in moment form.  Dim is a fixed size or Eigen::Dynamic.
template <int Dim>
struct GaussianState {
  Vec<Dim> mean;
  Mat<Dim> cov;
};

// The same belief in information form: info_matrix = cov^-1 and
// info_vector = cov^-1 * mean.
template <int Dim>
struct InformationState {
  Vec<Dim> info_vector;
  Mat<Dim> info_matrix;
};

// Linear measurement model y = H x + v with v ~ N(0, R).
template <int MeasDim, int StateDim>
struct LinearMeasurementModel {
  Mat<MeasDim, StateDim> H;
  Mat<MeasDim> R;
};

using GaussianStateX = GaussianState<Eigen::Dynamic>;
using InformationStateX = InformationState<Eigen::Dynamic>;
using LinearMeasurementModelX = LinearMeasurementModel<Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <int StateDim>
void check_state_dims(const GaussianState<StateDim>& state) {
  if (state.cov.rows() != state.mean.size() || state.cov.cols() != state.mean.size()) {
    throw ContractViolation("state covariance dimensions do not match the mean");
  }
}

template <int MeasDim, int StateDim>
void check_model_dims(const GaussianState<StateDim>& state,
                      const LinearMeasurementModel<MeasDim, StateDim>& model) {
  check_state_dims(state);
  if (model.H.cols() != state.mean.size()) {
    throw ContractViolation("measurement matrix columns do not match the state dimension");
  }
  if (model.R.rows() != model.H.rows() || model.R.cols() != model.H.rows()) {
    throw ContractViolation("measurement noise dimensions do not match the measurement matrix");
  }
}

}  // namespace detail

template <int StateDim>
InformationState<StateDim> to_information(const GaussianState<StateDim>& state) {
  detail::check_state_dims(state);
  const auto ldlt = spd_factorize(state.cov, "covariance");
  const Mat<StateDim> identity = Mat<StateDim>::Identity(state.cov.rows(), state.cov.cols());
  InformationState<StateDim> info;
  info.info_matrix = symmetrized(ldlt.solve(identity));
  info.info_vector = ldlt.solve(state.mean);
  return info;
}

template <int StateDim>
GaussianState<StateDim> from_information(const InformationState<StateDim>& info) {
  if (info.info_matrix.rows() != info.info_vector.size() ||
      info.info_matrix.cols() != info.info_vector.size()) {
    throw ContractViolation("information matrix dimensions do not match the information vector");
  }
  const auto ldlt = spd_factorize(info.info_matrix, "information matrix");
  const Mat<StateDim> identity =
      Mat<StateDim>::Identity(info.info_matrix.rows(), info.info_matrix.cols());
  GaussianState<StateDim> state;
  state.cov = symmetrized(ldlt.solve(identity));
  state.mean = ldlt.solve(info.info_vector);
  return state;
}

// Single moment-form (Kalman) measurement update.
template <int StateDim, int MeasDim>
GaussianState<StateDim> kalman_update(const GaussianState<StateDim>& prior,
                                      const LinearMeasurementModel<MeasDim, StateDim>& model,
                                      const Vec<MeasDim>& measurement) {
  detail::check_model_dims(prior, model);
  if (measurement.size() != model.H.rows()) {
    throw ContractViolation("measurement dimension does not match the measurement matrix");
  }

  const Mat<MeasDim> innovation_cov =
      symmetrized(model.R + model.H * prior.cov * model.H.transpose());
  const Mat<StateDim, MeasDim> cross_cov = prior.cov * model.H.transpose();
  // gain = cross_cov * innovation_cov^-1, computed through the factorization.
  const Mat<StateDim, MeasDim> gain =
      spd_solve(innovation_cov, Mat<MeasDim, StateDim>(cross_cov.transpose()),
                "innovation covariance")
          .transpose();

  GaussianState<StateDim> posterior;
  posterior.mean = prior.mean + gain * (measurement - model.H * prior.mean);
  posterior.cov = symmetrized(prior.cov - gain * innovation_cov * gain.transpose());
  return posterior;
}

// Batch measurement update in information form.  All measurements share the
// same model, so the update needs only their sum:
//   info_vector += H^T R^-1 * sum(y_i)
//   info_matrix += L * H^T R^-1 H
// An empty batch returns the prior unchanged.
template <int StateDim, int MeasDim>
GaussianState<StateDim> information_batch_update(
    const GaussianState<StateDim>& prior, const LinearMeasurementModel<MeasDim, StateDim>& model,
    const std::vector<Vec<MeasDim>>& batch) {
  detail::check_model_dims(prior, model);
  for (const auto& y : batch) {
    if (y.size() != model.H.rows()) {
      throw ContractViolation("measurement dimension does not match the measurement matrix");
    }
  }
  if (batch.empty()) {
    return prior;
  }

  InformationState<StateDim> info = to_information(prior);
  const Mat<MeasDim, StateDim> noise_solved_h = spd_solve(model.R, model.H, "measurement noise");
  const Vec<MeasDim> measurement_sum =
      pairwise_sum(0, batch.size(), [&](std::size_t i) -> Vec<MeasDim> { return batch[i]; });

  info.info_vector += noise_solved_h.transpose() * measurement_sum;
  info.info_matrix = symmetrized(info.info_matrix + static_cast<double>(batch.size()) *
                                                        (noise_solved_h.transpose() * model.H));
  return from_information(info);
}

}  // namespace elliptrack
