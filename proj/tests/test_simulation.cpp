#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "elliptrack/simulation.hpp"
#include "test_util.hpp"

using namespace elliptrack;

namespace {

ScenarioConfig tiny_scenario() {
  ScenarioConfig cfg;
  cfg.num_steps = 10;
  cfg.segment_plan = {Segment{10, 0.0}};
  cfg.poisson_rate = 10.0;
  cfg.rng_seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("straight trajectory walks the x axis one step length at a time") {
  ScenarioConfig cfg;
  cfg.num_steps = 5;
  cfg.segment_plan = {Segment{5, 0.0}};
  cfg.speed = 2.0;
  cfg.dt = 0.5;
  const auto truth = generate_trajectory(cfg);

  REQUIRE(truth.size() == 5);
  for (std::size_t k = 0; k < truth.size(); ++k) {
    CHECK(truth[k].center(0) ==
          Catch::Approx(static_cast<double>(k + 1) * 1.0).margin(1e-12));
    CHECK(std::abs(truth[k].center(1)) < 1e-12);
    CHECK(truth[k].heading == 0.0);
    CHECK(truth[k].velocity(0) == Catch::Approx(2.0).margin(1e-13));
    CHECK(truth[k].l1 == cfg.semi_axis_major);
    CHECK(truth[k].l2 == cfg.semi_axis_minor);
  }
}

TEST_CASE("a quarter turn spreads evenly over its steps") {
  ScenarioConfig cfg;
  cfg.num_steps = 10;
  cfg.segment_plan = {Segment{10, std::numbers::pi / 2.0}};
  const auto truth = generate_trajectory(cfg);

  REQUIRE(truth.size() == 10);
  const double increment = std::numbers::pi / 20.0;  // nine degrees
  Vec<2> previous = Vec<2>::Zero();
  for (std::size_t k = 0; k < truth.size(); ++k) {
    CHECK(truth[k].heading ==
          Catch::Approx(static_cast<double>(k + 1) * increment).margin(1e-12));
    CHECK((truth[k].center - previous).norm() ==
          Catch::Approx(cfg.speed * cfg.dt).margin(1e-9));
    previous = truth[k].center;
  }
  CHECK(truth.back().heading == Catch::Approx(std::numbers::pi / 2.0).margin(1e-12));
}

TEST_CASE("default plan: step count, path length, cumulative heading") {
  ScenarioConfig cfg;
  const auto truth = generate_trajectory(cfg);
  REQUIRE(static_cast<int>(truth.size()) == cfg.num_steps);

  double path = truth.front().center.norm();
  for (std::size_t k = 1; k < truth.size(); ++k) {
    path += (truth[k].center - truth[k - 1].center).norm();
  }
  CHECK(path == Catch::Approx(cfg.num_steps * cfg.speed * cfg.dt).margin(1e-9));
  CHECK(truth.back().heading ==
        Catch::Approx(3.0 * std::numbers::pi / 2.0).margin(1e-12));
}

TEST_CASE("trajectory contract violations") {
  ScenarioConfig cfg;
  cfg.num_steps = 100;  // plan still sums to 104
  CHECK_THROWS_AS(generate_trajectory(cfg), ContractViolation);

  cfg = ScenarioConfig{};
  cfg.dt = 0.0;
  CHECK_THROWS_AS(generate_trajectory(cfg), ContractViolation);

  cfg = ScenarioConfig{};
  cfg.semi_axis_minor = 0.0;
  CHECK_THROWS_AS(generate_trajectory(cfg), ContractViolation);

  cfg = ScenarioConfig{};
  cfg.segment_plan.push_back(Segment{0, 0.0});
  CHECK_THROWS_AS(generate_trajectory(cfg), ContractViolation);
}

TEST_CASE("point-target sampling collapses onto the center") {
  GroundTruthStep truth;
  truth.center = Vec<2>(12.0, -3.0);
  truth.heading = 0.4;
  truth.l1 = 1e-9;
  truth.l2 = 1e-9;
  truth.velocity = Vec<2>::Zero();

  RandomStream rng(31);
  const auto batch =
      sample_measurements(truth, 30.0, 1e-18 * Mat<2>::Identity(), rng);
  for (const auto& y : batch.points) {
    CHECK((y - truth.center).norm() < 1e-8);
  }
}

TEST_CASE("sampled scans match the model's first two moments") {
  GroundTruthStep truth;
  truth.center = Vec<2>(5.0, -2.0);
  truth.heading = 0.3;
  truth.l1 = 170.0;
  truth.l2 = 40.0;
  truth.velocity = Vec<2>::Zero();
  const Mat<2> additive = Vec<2>(10000.0, 1600.0).asDiagonal();
  const double rate = 20.0;

  const Mat<2> shape = shape_matrix(shape_params(truth));
  const Mat<2> cov_true =
      symmetrized(shape * (0.25 * Mat<2>::Identity()) * shape.transpose()) + additive;

  RandomStream rng(20260813);
  long total = 0;
  long scans = 0;
  Vec<2> sum = Vec<2>::Zero();
  Mat<2> sum_centered = Mat<2>::Zero();
  Mat<2> sum_centered_sq = Mat<2>::Zero();
  while (total < 1000000) {
    const auto batch = sample_measurements(truth, rate, additive, rng);
    ++scans;
    for (const auto& y : batch.points) {
      ++total;
      sum += y;
      const Vec<2> d = y - truth.center;
      const Mat<2> prod = d * d.transpose();
      sum_centered += prod;
      sum_centered_sq += prod.cwiseProduct(prod);
    }
  }

  const double n = static_cast<double>(total);
  const Vec<2> mean = sum / n;
  for (int i = 0; i < 2; ++i) {
    const double se = std::sqrt(cov_true(i, i) / n);
    CHECK(std::abs(mean(i) - truth.center(i)) <= 3.0 * se);
  }
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      const double entry = sum_centered(i, j) / n;
      const double second = sum_centered_sq(i, j) / n;
      const double se = std::sqrt(std::max(0.0, second - entry * entry) / n);
      INFO("covariance entry " << i << "," << j);
      CHECK(std::abs(entry - cov_true(i, j)) <= 3.0 * se);
    }
  }

  // The scan count behaves like a Poisson variable with the demanded rate.
  const double mean_count = n / static_cast<double>(scans);
  CHECK(std::abs(mean_count - rate) <=
        3.0 * std::sqrt(rate / static_cast<double>(scans)) + rate / n);
}

TEST_CASE("track initialization from the four-point cross") {
  MeasurementBatch batch;
  batch.points = {Vec<2>(1.0, 0.0), Vec<2>(-1.0, 0.0), Vec<2>(0.0, 2.0),
                  Vec<2>(0.0, -2.0)};
  const auto track = initialize_track(batch);
  REQUIRE(track.has_value());

  // Sample covariance diag(2/3, 8/3); major axis along y.
  CHECK(track->kinematic.mean.head<2>().norm() < 1e-12);
  CHECK(track->kinematic.mean.tail<4>().norm() == 0.0);
  CHECK(track->shape.mean(0) == Catch::Approx(std::numbers::pi / 2.0).margin(1e-12));
  CHECK(track->shape.mean(1) ==
        Catch::Approx(std::sqrt(kGate95 * 8.0 / 3.0)).epsilon(1e-12));
  CHECK(track->shape.mean(2) ==
        Catch::Approx(std::sqrt(kGate95 * 2.0 / 3.0)).epsilon(1e-12));

  const TrackInitPriors priors;
  CHECK(testutil::rel_diff(track->kinematic.cov,
                           Mat<6>(priors.kinematic_var.asDiagonal())) == 0.0);
  CHECK(testutil::rel_diff(track->shape.cov,
                           Mat<3>(priors.shape_var.asDiagonal())) == 0.0);
}

TEST_CASE("initialization defers on inadequate scans") {
  MeasurementBatch two;
  two.points = {Vec<2>(0.0, 0.0), Vec<2>(1.0, 1.0)};
  CHECK_FALSE(initialize_track(two).has_value());

  MeasurementBatch identical;
  identical.points.assign(5, Vec<2>(3.0, 4.0));
  CHECK_FALSE(initialize_track(identical).has_value());

  MeasurementBatch collinear;
  for (int i = 0; i < 6; ++i)
    collinear.points.push_back(Vec<2>(static_cast<double>(i), 2.0 * i));
  CHECK_FALSE(initialize_track(collinear).has_value());
}

TEST_CASE("initialization is equivariant under rotations") {
  RandomStream rng(41);
  GroundTruthStep truth;
  truth.center = Vec<2>(100.0, 50.0);
  truth.heading = 0.2;
  truth.l1 = 120.0;
  truth.l2 = 30.0;
  truth.velocity = Vec<2>::Zero();
  const auto batch =
      sample_measurements(truth, 200.0, 25.0 * Mat<2>::Identity(), rng);
  const auto base = initialize_track(batch);
  REQUIRE(base.has_value());

  const double theta = 0.7;
  Mat<2> r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  MeasurementBatch rotated;
  for (const auto& y : batch.points) rotated.points.push_back(r * y);
  const auto turned = initialize_track(rotated);
  REQUIRE(turned.has_value());

  CHECK(testutil::rel_diff(turned->kinematic.mean.head<2>(),
                           Vec<2>(r * base->kinematic.mean.head<2>())) < 1e-9);
  CHECK(turned->shape.mean(1) == Catch::Approx(base->shape.mean(1)).epsilon(1e-9));
  CHECK(turned->shape.mean(2) == Catch::Approx(base->shape.mean(2)).epsilon(1e-9));

  // Orientation is defined modulo pi.
  double delta = turned->shape.mean(0) - base->shape.mean(0) - theta;
  delta = std::remainder(delta, std::numbers::pi);
  CHECK(std::abs(delta) < 1e-9);
}

TEST_CASE("tracker specs parse and reject as documented") {
  CHECK(parse_tracker_spec("ekf_star").kind == TrackerKind::MemEkfStar);
  CHECK(parse_tracker_spec("eif_yl").kind == TrackerKind::MemEifYl);

  const TrackerSpec four = parse_tracker_spec("eif_y0:U=4");
  CHECK(four.kind == TrackerKind::MemEifY0);
  CHECK(four.chunk_count == 4);
  CHECK_FALSE(four.chunks_follow_batch);

  const TrackerSpec follow = parse_tracker_spec("eif_y0:U=L");
  CHECK(follow.chunks_follow_batch);
  CHECK(follow.label == "eif_y0:U=L");

  CHECK_THROWS_AS(parse_tracker_spec("eif_y0:U=0"), ContractViolation);
  CHECK_THROWS_AS(parse_tracker_spec("eif_y0:U=four"), ContractViolation);
  CHECK_THROWS_AS(parse_tracker_spec("bogus"), ContractViolation);
}

TEST_CASE("monte carlo results are independent of the thread count") {
  ScenarioConfig cfg = tiny_scenario();
  const TrackerSpec tracker = parse_tracker_spec("eif_yl");

  cfg.threads = 1;
  const MonteCarloResult serial = run_monte_carlo(cfg, tracker, 6);
  cfg.threads = 4;
  const MonteCarloResult threaded = run_monte_carlo(cfg, tracker, 6);

  REQUIRE(serial.run_errors.size() == threaded.run_errors.size());
  for (std::size_t r = 0; r < serial.run_errors.size(); ++r) {
    REQUIRE(serial.run_errors[r].size() == threaded.run_errors[r].size());
    for (std::size_t k = 0; k < serial.run_errors[r].size(); ++k) {
      CHECK(serial.run_errors[r][k] == threaded.run_errors[r][k]);
    }
  }
  for (std::size_t k = 0; k < serial.mean_error.size(); ++k) {
    CHECK(serial.mean_error[k] == threaded.mean_error[k]);
  }
}

TEST_CASE("runs use independent streams: prefixes agree across run counts") {
  ScenarioConfig cfg = tiny_scenario();
  cfg.threads = 1;
  const TrackerSpec tracker = parse_tracker_spec("ekf_star");

  const MonteCarloResult five = run_monte_carlo(cfg, tracker, 5);
  const MonteCarloResult three = run_monte_carlo(cfg, tracker, 3);
  for (std::size_t r = 0; r < 3; ++r) {
    REQUIRE(five.run_errors[r].size() == three.run_errors[r].size());
    for (std::size_t k = 0; k < three.run_errors[r].size(); ++k) {
      CHECK(five.run_errors[r][k] == three.run_errors[r][k]);
    }
  }
}

TEST_CASE("monte carlo bookkeeping: sizes, single-run std, timing") {
  ScenarioConfig cfg = tiny_scenario();
  cfg.threads = 1;
  const MonteCarloResult result =
      run_monte_carlo(cfg, parse_tracker_spec("eif_y0:U=2"), 1);
  CHECK(result.runs == 1);
  CHECK(result.mean_error.size() == static_cast<std::size_t>(cfg.num_steps));
  CHECK(result.std_error.size() == static_cast<std::size_t>(cfg.num_steps));
  for (double s : result.std_error) CHECK(s == 0.0);
  CHECK(result.seconds_per_update > 0.0);

  CHECK_THROWS_AS(run_monte_carlo(cfg, parse_tracker_spec("ekf_star"), 0),
                  ContractViolation);
}

TEST_CASE("zero-noise pipeline tracks the truth to numerical precision") {
  // Straight constant-velocity target, perfect prior, negligible priors'
  // covariance and process noise: prediction matches the truth exactly and
  // the update gains vanish, so the error series must sit at numerical zero.
  ScenarioConfig cfg;
  cfg.num_steps = 12;
  cfg.segment_plan = {Segment{12, 0.0}};
  cfg.speed = 10.0;
  cfg.dt = 1.0;
  cfg.semi_axis_major = 2.0;
  cfg.semi_axis_minor = 0.8;
  cfg.additive_cov = 1e-18 * Mat<2>::Identity();
  const auto truth = generate_trajectory(cfg);

  MemNoiseConfig noise;
  noise.multiplicative_cov = 0.25 * Mat<2>::Identity();
  noise.additive_cov = cfg.additive_cov;
  MotionConfig motion;
  motion.dt = cfg.dt;
  motion.jerk_psd = 0.0;
  motion.shape_process_noise = Mat<3>::Zero();

  TrackState start;
  start.kinematic.mean << 10.0, 0.0, 10.0, 0.0, 0.0, 0.0;  // truth at k = 0
  start.kinematic.cov = 1e-18 * Mat<6>::Identity();
  start.shape.mean << 0.0, 2.0, 0.8;
  start.shape.cov = 1e-18 * Mat<3>::Identity();

  BatchUpdateConfig y0_cfg;
  y0_cfg.chunk_count = 4;

  const auto drive = [&](auto&& update) {
    TrackState track = start;
    RandomStream rng(99);
    double worst = 0.0;
    for (std::size_t k = 1; k < truth.size(); ++k) {
      track = predict(track, motion);
      const auto batch = sample_measurements(truth[k], 15.0, cfg.additive_cov,
                                             rng, static_cast<int>(k));
      if (!batch.points.empty()) {
        track = update(track, batch);
      }
      worst = std::max(worst,
                       gw_distance(track_ellipse(track), truth_ellipse(truth[k])));
    }
    return worst;
  };

  const double ekf = drive([&](const TrackState& t, const MeasurementBatch& b) {
    return sequential_update(t, b, noise);
  });
  const double yl = drive([&](const TrackState& t, const MeasurementBatch& b) {
    return batch_update_yl(t, b, noise);
  });
  const double y0 = drive([&](const TrackState& t, const MeasurementBatch& b) {
    return batch_update_y0(t, b, noise, y0_cfg);
  });

  CHECK(ekf < 1e-6);
  CHECK(yl < 1e-6);
  CHECK(y0 < 1e-6);
}

TEST_CASE("failures carry run and step context") {
  ScenarioConfig cfg = tiny_scenario();
  cfg.threads = 1;
  cfg.additive_cov << 1.0, 2.0, 2.0, 1.0;  // indefinite: LLT must fail
  try {
    run_monte_carlo(cfg, parse_tracker_spec("ekf_star"), 1);
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(e.matrix_name().find("additive measurement covariance") !=
          std::string::npos);
  }
}
