#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "elliptrack/errors.hpp"
#include "elliptrack/linalg.hpp"
#include "elliptrack/memeif.hpp"
#include "elliptrack/memekf_star.hpp"
#include "elliptrack/metrics.hpp"
#include "elliptrack/motion.hpp"
#include "elliptrack/rng.hpp"

namespace elliptrack {

// One leg of the reference trajectory: `steps` prediction intervals with the
// heading turning by `turn_angle` in total (zero for a straight leg).
struct Segment {
  int steps = 0;
  double turn_angle = 0.0;
};

inline std::vector<Segment> default_segment_plan() {
  constexpr double quarter = std::numbers::pi / 2.0;
  return {{22, 0.0}, {10, quarter}, {20, 0.0}, {10, quarter}, {20, 0.0}, {10, quarter}, {12, 0.0}};
}

// Scenario and filter configuration shared by every tracker variant.
struct ScenarioConfig {
  // target and sensor
  double semi_axis_major = 170.0;
  double semi_axis_minor = 40.0;
  double speed = 50.0 / 3.6;  // m/s
  double poisson_rate = 20.0;
  int num_steps = 104;
  double dt = 10.0;
  std::vector<Segment> segment_plan = default_segment_plan();
  Mat<2> additive_cov = Vec<2>(10000.0, 1600.0).asDiagonal();
  std::uint64_t rng_seed = 1;

  // filter tuning
  Mat<2> multiplicative_cov = 0.25 * Mat<2>::Identity();
  double jerk_psd = 0.005;
  Vec<3> shape_process_noise = Vec<3>(0.01, 1.0, 1.0);  // diagonal, per scan
  Vec<6> init_kinematic_var = (Vec<6>() << 900.0, 900.0, 100.0, 100.0, 1.0, 1.0).finished();
  Vec<3> init_shape_var = Vec<3>(0.05, 400.0, 100.0);
  double clamp_factor = 0.4;
  int threads = 0;  // 0 = hardware concurrency
};

// Ground truth at one scan instant.
struct GroundTruthStep {
  Vec<2> center;
  double heading = 0.0;  // also the ellipse orientation
  double l1 = 1.0;
  double l2 = 1.0;
  Vec<2> velocity;
};

inline ShapeParams shape_params(const GroundTruthStep& step) {
  return ShapeParams{step.heading, step.l1, step.l2};
}

inline Ellipse truth_ellipse(const GroundTruthStep& step) {
  return Ellipse{step.center, extent_matrix(shape_params(step))};
}

// Deterministic reference trajectory: starting from the origin with heading
// zero, each step first applies the segment's per-step heading increment and
// then advances the center by speed * dt, so the recorded path length is
// num_steps * speed * dt.
inline std::vector<GroundTruthStep> generate_trajectory(const ScenarioConfig& cfg) {
  if (cfg.num_steps < 1) {
    throw ContractViolation("num_steps must be at least 1");
  }
  if (!(cfg.dt > 0.0) || !(cfg.speed >= 0.0)) {
    throw ContractViolation("dt must be positive and speed non-negative");
  }
  if (!(cfg.semi_axis_major > 0.0) || !(cfg.semi_axis_minor > 0.0)) {
    throw ContractViolation("semi-axes must be positive");
  }
  int plan_steps = 0;
  for (const Segment& segment : cfg.segment_plan) {
    if (segment.steps < 1) {
      throw ContractViolation("every segment needs at least one step");
    }
    plan_steps += segment.steps;
  }
  if (plan_steps != cfg.num_steps) {
    throw ContractViolation("segment plan step counts must sum to num_steps");
  }

  std::vector<GroundTruthStep> steps;
  steps.reserve(static_cast<std::size_t>(cfg.num_steps));
  Vec<2> center = Vec<2>::Zero();
  double heading = 0.0;
  for (const Segment& segment : cfg.segment_plan) {
    const double increment = segment.turn_angle / segment.steps;
    for (int i = 0; i < segment.steps; ++i) {
      heading += increment;
      const Vec<2> direction(std::cos(heading), std::sin(heading));
      center += cfg.speed * cfg.dt * direction;
      steps.push_back(GroundTruthStep{center, heading, cfg.semi_axis_major, cfg.semi_axis_minor,
                                      cfg.speed * direction});
    }
  }
  return steps;
}

// Draws one scan: a Poisson number of measurement sources scattered
// uniformly over the extent plus additive Gaussian sensor noise.
inline MeasurementBatch sample_measurements(const GroundTruthStep& truth, double poisson_rate,
                                            const Mat<2>& additive_cov, RandomStream& rng,
                                            int scan_index = 0) {
  const int count = rng.poisson(poisson_rate);
  const Mat<2> shape = shape_matrix(shape_params(truth));
  const Eigen::LLT<Mat<2>> llt(additive_cov);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("additive measurement covariance");
  }
  const Mat<2> noise_root = llt.matrixL();

  MeasurementBatch batch;
  batch.scan_index = scan_index;
  batch.points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const Vec<2> source = rng.uniform_unit_disk();
    const Vec<2> noise = noise_root * rng.normal2();
    batch.points.push_back(truth.center + shape * source + noise);
  }
  return batch;
}

// Diagonal priors used when a track is started from sample statistics.
struct TrackInitPriors {
  Vec<6> kinematic_var = (Vec<6>() << 900.0, 900.0, 100.0, 100.0, 1.0, 1.0).finished();
  Vec<3> shape_var = Vec<3>(0.05, 400.0, 100.0);
};

// 95% quantile of the chi-squared distribution with two degrees of freedom;
// scales the sample covariance to a 95% coverage ellipse.
inline constexpr double kGate95 = 5.991;

// Starts a track from the sample statistics of a scan: position from the
// sample mean, orientation from the leading eigenvector of the scaled sample
// covariance, semi-axes from the scaled eigenvalues.  Velocity and
// acceleration start at zero.  Returns nothing when the batch is too small
// or its spread is rank deficient; the caller should accumulate another scan
// and retry.
inline std::optional<TrackState> initialize_track(const MeasurementBatch& batch,
                                                  const TrackInitPriors& priors = {}) {
  const std::size_t n = batch.points.size();
  if (n < 3) {
    return std::nullopt;
  }
  const Vec<2> mean =
      pairwise_sum(0, n, [&](std::size_t i) -> Vec<2> { return batch.points[i]; }) /
      static_cast<double>(n);
  const Mat<2> scatter = pairwise_sum(0, n, [&](std::size_t i) -> Mat<2> {
                           const Vec<2> d = batch.points[i] - mean;
                           return Mat<2>(d * d.transpose());
                         }) /
                         static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Mat<2>> solver(scatter);
  const double minor = solver.eigenvalues()(0);
  const double major = solver.eigenvalues()(1);
  if (!(major > 0.0) || !(minor > 1e-9 * major)) {
    return std::nullopt;  // rank-deficient spread
  }

  const Vec<2> axis = solver.eigenvectors().col(1);
  double alpha = std::atan2(axis(1), axis(0));
  // The orientation is only identified modulo pi; normalize to (-pi/2, pi/2].
  if (alpha > std::numbers::pi / 2.0) alpha -= std::numbers::pi;
  if (alpha <= -std::numbers::pi / 2.0) alpha += std::numbers::pi;

  TrackState track;
  track.kinematic.mean = Vec<6>::Zero();
  track.kinematic.mean.head<2>() = mean;
  track.kinematic.cov = priors.kinematic_var.asDiagonal();
  track.shape.mean = Vec<3>(alpha, std::sqrt(kGate95 * major), std::sqrt(kGate95 * minor));
  track.shape.cov = priors.shape_var.asDiagonal();
  return track;
}

enum class TrackerKind { MemEkfStar, MemEifYl, MemEifY0 };

// Tracker selector: which update runs on each scan.  `chunks_follow_batch`
// marks the symbolic chunk count "L" (one chunk per measurement).
struct TrackerSpec {
  TrackerKind kind = TrackerKind::MemEkfStar;
  int chunk_count = 1;
  bool chunks_follow_batch = false;
  std::string label = "ekf_star";
};

inline TrackerSpec parse_tracker_spec(std::string_view text) {
  TrackerSpec spec;
  spec.label = std::string(text);
  if (text == "ekf_star") {
    spec.kind = TrackerKind::MemEkfStar;
    return spec;
  }
  if (text == "eif_yl") {
    spec.kind = TrackerKind::MemEifYl;
    return spec;
  }
  constexpr std::string_view prefix = "eif_y0:U=";
  if (text.substr(0, prefix.size()) == prefix) {
    spec.kind = TrackerKind::MemEifY0;
    const std::string_view arg = text.substr(prefix.size());
    if (arg == "L") {
      spec.chunks_follow_batch = true;
      return spec;
    }
    int value = 0;
    std::size_t consumed = 0;
    try {
      value = std::stoi(std::string(arg), &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed != arg.size() || value < 1) {
      throw ContractViolation("chunk count must be a positive integer or 'L': " +
                              std::string(text));
    }
    spec.chunk_count = value;
    return spec;
  }
  throw ContractViolation("unknown tracker spec '" + std::string(text) +
                          "' (expected ekf_star, eif_yl or eif_y0:U=<n|L>)");
}

// Aggregated Monte Carlo outcome for one tracker.
struct MonteCarloResult {
  std::vector<double> mean_error;               // per scan index
  std::vector<double> std_error;                // per scan index, across runs
  std::vector<std::vector<double>> run_errors;  // [run][scan]
  double seconds_per_update = 0.0;              // mean wall clock per measurement update
  int runs = 0;
};

namespace detail {

struct RunTiming {
  double seconds = 0.0;
  long updates = 0;
};

// One Monte Carlo run: initialize from the first scan(s), then alternate
// prediction and the selected measurement update, scoring the
// Gauss-Wasserstein error against the ground truth at every scan.
inline std::vector<double> simulate_run(const ScenarioConfig& cfg,
                                        const std::vector<GroundTruthStep>& truth,
                                        const TrackerSpec& spec, std::uint64_t run_index,
                                        RunTiming& timing) {
  RandomStream rng = RandomStream::for_run(cfg.rng_seed, run_index);
  const MemNoiseConfig noise{cfg.multiplicative_cov, cfg.additive_cov};
  const MotionConfig motion{cfg.dt, cfg.jerk_psd, Mat<3>(cfg.shape_process_noise.asDiagonal())};
  const TrackInitPriors priors{cfg.init_kinematic_var, cfg.init_shape_var};
  BatchUpdateConfig eif_cfg;
  eif_cfg.clamp_factor = cfg.clamp_factor;

  std::vector<double> errors(truth.size(), 0.0);

  // Accumulate scans until the sample statistics support a track.
  MeasurementBatch pending;
  pending.scan_index = 0;
  std::optional<TrackState> track;
  std::size_t k = 0;
  for (; k < truth.size(); ++k) {
    const MeasurementBatch scan = sample_measurements(truth[k], cfg.poisson_rate,
                                                      cfg.additive_cov, rng, static_cast<int>(k));
    pending.points.insert(pending.points.end(), scan.points.begin(), scan.points.end());
    track = initialize_track(pending, priors);
    if (track) {
      break;
    }
  }
  if (!track) {
    throw SingularMatrixError("initialization sample covariance",
                              "run " + std::to_string(run_index) +
                                  " produced no usable initialization scan");
  }
  for (std::size_t j = 0; j <= k; ++j) {
    errors[j] = gw_distance(track_ellipse(*track), truth_ellipse(truth[j]));
  }

  for (++k; k < truth.size(); ++k) {
    try {
      *track = predict(*track, motion);
      clamp_shape_covariance(*track, cfg.clamp_factor);
      const MeasurementBatch batch = sample_measurements(
          truth[k], cfg.poisson_rate, cfg.additive_cov, rng, static_cast<int>(k));
      if (!batch.points.empty()) {
        const auto start = std::chrono::steady_clock::now();
        switch (spec.kind) {
          case TrackerKind::MemEkfStar:
            *track = sequential_update(*track, batch, noise);
            // The sequential update has no internal clamp; apply the same
            // post-scan clamp the batch variants perform internally.
            clamp_shape_covariance(*track, cfg.clamp_factor);
            break;
          case TrackerKind::MemEifYl:
            *track = batch_update_yl(*track, batch, noise, eif_cfg);
            break;
          case TrackerKind::MemEifY0:
            eif_cfg.chunk_count = spec.chunks_follow_batch
                                      ? static_cast<int>(batch.points.size())
                                      : spec.chunk_count;
            *track = batch_update_y0(*track, batch, noise, eif_cfg);
            break;
        }
        timing.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                              .count();
        timing.updates += 1;
      }
      errors[k] = gw_distance(track_ellipse(*track), truth_ellipse(truth[k]));
    } catch (const SingularMatrixError& e) {
      std::string context = "run " + std::to_string(run_index) + ", step " + std::to_string(k);
      if (!e.context().empty()) {
        context += ", " + e.context();
      }
      throw SingularMatrixError(e.matrix_name(), context);
    }
  }
  return errors;
}

}  // namespace detail

// Monte Carlo evaluation of one tracker on the scenario.  Runs use
// independent random streams derived from (rng_seed, run index), so results
// are reproducible and independent of the number of worker threads.
inline MonteCarloResult run_monte_carlo(const ScenarioConfig& cfg, const TrackerSpec& tracker,
                                        int runs) {
  if (runs < 1) {
    throw ContractViolation("runs must be at least 1");
  }
  if (!(cfg.poisson_rate > 0.0)) {
    throw ContractViolation("poisson_rate must be positive");
  }
  const std::vector<GroundTruthStep> truth = generate_trajectory(cfg);

  MonteCarloResult result;
  result.runs = runs;
  result.run_errors.assign(static_cast<std::size_t>(runs), {});
  std::vector<detail::RunTiming> timings(static_cast<std::size_t>(runs));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(runs));

  const auto work = [&](std::size_t run) {
    try {
      result.run_errors[run] = detail::simulate_run(cfg, truth, tracker, run, timings[run]);
    } catch (...) {
      failures[run] = std::current_exception();
    }
  };

  unsigned hardware = std::thread::hardware_concurrency();
  unsigned worker_count = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                          : (hardware > 0 ? hardware : 1);
  worker_count = std::min<unsigned>(worker_count, static_cast<unsigned>(runs));
  if (worker_count <= 1) {
    for (int run = 0; run < runs; ++run) {
      work(static_cast<std::size_t>(run));
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) {
      workers.emplace_back([&] {
        for (int run = next.fetch_add(1); run < runs; run = next.fetch_add(1)) {
          work(static_cast<std::size_t>(run));
        }
      });
    }
    for (std::thread& worker : workers) {
      worker.join();
    }
  }
  for (const std::exception_ptr& failure : failures) {
    if (failure) {
      std::rethrow_exception(failure);
    }
  }

  const std::size_t steps = truth.size();
  result.mean_error.assign(steps, 0.0);
  result.std_error.assign(steps, 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double mean = pairwise_sum(0, static_cast<std::size_t>(runs),
                                     [&](std::size_t r) -> double {
                                       return result.run_errors[r][k];
                                     }) /
                        runs;
    result.mean_error[k] = mean;
    if (runs > 1) {
      const double ss = pairwise_sum(0, static_cast<std::size_t>(runs), [&](std::size_t r) {
        const double d = result.run_errors[r][k] - mean;
        return d * d;
      });
      result.std_error[k] = std::sqrt(ss / (runs - 1));
    }
  }

  double seconds = 0.0;
  long updates = 0;
  for (const detail::RunTiming& timing : timings) {
    seconds += timing.seconds;
    updates += timing.updates;
  }
  result.seconds_per_update = updates > 0 ? seconds / static_cast<double>(updates) : 0.0;
  return result;
}

}  // namespace elliptrack
