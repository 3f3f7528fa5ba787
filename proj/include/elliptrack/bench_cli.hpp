#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "elliptrack/errors.hpp"
#include "elliptrack/simulation.hpp"

namespace elliptrack {

// Configuration problems (unreadable files, unknown keys, invalid values);
// commands report them on stderr and exit with code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

namespace detail {

inline std::string trim(std::string_view text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) {
    return {};
  }
  const auto end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

inline std::vector<std::string> split(std::string_view text, char separator) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t end = text.find(separator, begin);
    if (end == std::string_view::npos) {
      parts.emplace_back(text.substr(begin));
      break;
    }
    parts.emplace_back(text.substr(begin, end - begin));
    begin = end + 1;
  }
  return parts;
}

inline double parse_double(const std::string& value, const std::string& what) {
  try {
    std::size_t consumed = 0;
    const double parsed = std::stod(value, &consumed);
    if (consumed == value.size()) {
      return parsed;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid number for " + what + ": '" + value + "'");
}

inline int parse_int(const std::string& value, const std::string& what) {
  try {
    std::size_t consumed = 0;
    const int parsed = std::stoi(value, &consumed);
    if (consumed == value.size()) {
      return parsed;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid integer for " + what + ": '" + value + "'");
}

inline std::uint64_t parse_u64(const std::string& value, const std::string& what) {
  try {
    std::size_t consumed = 0;
    const std::uint64_t parsed = std::stoull(value, &consumed);
    if (consumed == value.size() && value.find('-') == std::string::npos) {
      return parsed;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid unsigned integer for " + what + ": '" + value + "'");
}

inline std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

}  // namespace detail

// Segment plan syntax: whitespace-separated legs, each either "s:<steps>"
// (straight) or "t:<steps>:<degrees>" (turn by <degrees> in total).
inline std::vector<Segment> parse_segment_plan(const std::string& text) {
  std::vector<Segment> plan;
  std::istringstream stream(text);
  std::string token;
  while (stream >> token) {
    const std::vector<std::string> fields = detail::split(token, ':');
    Segment segment;
    if (fields.size() == 2 && fields[0] == "s") {
      segment.steps = detail::parse_int(fields[1], "segment steps");
    } else if (fields.size() == 3 && fields[0] == "t") {
      segment.steps = detail::parse_int(fields[1], "segment steps");
      segment.turn_angle =
          detail::parse_double(fields[2], "turn angle") * std::numbers::pi / 180.0;
    } else {
      throw ConfigError("invalid segment token '" + token +
                        "' (expected s:<steps> or t:<steps>:<degrees>)");
    }
    if (segment.steps < 1) {
      throw ConfigError("segment step count must be at least 1: '" + token + "'");
    }
    plan.push_back(segment);
  }
  if (plan.empty()) {
    throw ConfigError("segment_plan must contain at least one segment");
  }
  return plan;
}

struct LoadedConfig {
  ScenarioConfig scenario;
  std::uint64_t hash = 0;
  std::string canonical_text;
};

// Loads a flat key/value configuration file ('#' comment lines and blank
// lines ignored, one "key = value" pair per line).  Unknown and duplicate
// keys are errors.  The provenance hash is FNV-1a over the canonicalized
// text: trimmed "key=value" lines sorted by key, one per line.  The
// ELLIPTRACK_SEED environment variable, when set, overrides the seed.
inline LoadedConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }

  std::map<std::string, std::string> entries;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') {
      continue;
    }
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_number) + ": expected key = value");
    }
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_number) + ": empty key");
    }
    if (!entries.emplace(key, value).second) {
      throw ConfigError(path + ":" + std::to_string(line_number) + ": duplicate key '" + key +
                        "'");
    }
  }

  LoadedConfig loaded;
  for (const auto& [key, value] : entries) {
    loaded.canonical_text += key + "=" + value + "\n";
  }
  loaded.hash = fnv1a64(loaded.canonical_text);

  ScenarioConfig& cfg = loaded.scenario;
  bool steps_given = false;
  bool plan_given = false;
  for (const auto& [key, value] : entries) {
    if (key == "seed") {
      cfg.rng_seed = detail::parse_u64(value, key);
    } else if (key == "semi_axis_major") {
      cfg.semi_axis_major = detail::parse_double(value, key);
    } else if (key == "semi_axis_minor") {
      cfg.semi_axis_minor = detail::parse_double(value, key);
    } else if (key == "speed") {
      cfg.speed = detail::parse_double(value, key);
    } else if (key == "poisson_rate") {
      cfg.poisson_rate = detail::parse_double(value, key);
    } else if (key == "num_steps") {
      cfg.num_steps = detail::parse_int(value, key);
      steps_given = true;
    } else if (key == "dt") {
      cfg.dt = detail::parse_double(value, key);
    } else if (key == "segment_plan") {
      cfg.segment_plan = parse_segment_plan(value);
      plan_given = true;
    } else if (key == "meas_cov_xx") {
      cfg.additive_cov(0, 0) = detail::parse_double(value, key);
    } else if (key == "meas_cov_yy") {
      cfg.additive_cov(1, 1) = detail::parse_double(value, key);
    } else if (key == "meas_cov_xy") {
      cfg.additive_cov(0, 1) = cfg.additive_cov(1, 0) = detail::parse_double(value, key);
    } else if (key == "mult_cov_xx") {
      cfg.multiplicative_cov(0, 0) = detail::parse_double(value, key);
    } else if (key == "mult_cov_yy") {
      cfg.multiplicative_cov(1, 1) = detail::parse_double(value, key);
    } else if (key == "mult_cov_xy") {
      cfg.multiplicative_cov(0, 1) = cfg.multiplicative_cov(1, 0) =
          detail::parse_double(value, key);
    } else if (key == "jerk_psd") {
      cfg.jerk_psd = detail::parse_double(value, key);
    } else if (key == "shape_noise_alpha") {
      cfg.shape_process_noise[0] = detail::parse_double(value, key);
    } else if (key == "shape_noise_l1") {
      cfg.shape_process_noise[1] = detail::parse_double(value, key);
    } else if (key == "shape_noise_l2") {
      cfg.shape_process_noise[2] = detail::parse_double(value, key);
    } else if (key == "init_pos_var") {
      cfg.init_kinematic_var[0] = cfg.init_kinematic_var[1] = detail::parse_double(value, key);
    } else if (key == "init_vel_var") {
      cfg.init_kinematic_var[2] = cfg.init_kinematic_var[3] = detail::parse_double(value, key);
    } else if (key == "init_acc_var") {
      cfg.init_kinematic_var[4] = cfg.init_kinematic_var[5] = detail::parse_double(value, key);
    } else if (key == "init_shape_alpha_var") {
      cfg.init_shape_var[0] = detail::parse_double(value, key);
    } else if (key == "init_shape_l1_var") {
      cfg.init_shape_var[1] = detail::parse_double(value, key);
    } else if (key == "init_shape_l2_var") {
      cfg.init_shape_var[2] = detail::parse_double(value, key);
    } else if (key == "clamp_factor") {
      cfg.clamp_factor = detail::parse_double(value, key);
    } else if (key == "threads") {
      cfg.threads = detail::parse_int(value, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  if (plan_given && !steps_given) {
    int total = 0;
    for (const Segment& segment : cfg.segment_plan) total += segment.steps;
    cfg.num_steps = total;
  } else if (!plan_given && steps_given) {
    cfg.segment_plan = {Segment{cfg.num_steps, 0.0}};
  }

  if (const char* env_seed = std::getenv("ELLIPTRACK_SEED"); env_seed && *env_seed) {
    cfg.rng_seed = detail::parse_u64(env_seed, "ELLIPTRACK_SEED");
  }
  return loaded;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
  std::string config_path;
  std::string trackers = "ekf_star,eif_yl";
  int runs = 100;
  std::string out_path;
};

namespace detail {

inline std::vector<TrackerSpec> parse_tracker_list(const std::string& text) {
  std::vector<TrackerSpec> specs;
  for (const std::string& token : split(text, ',')) {
    const std::string stripped = trim(token);
    if (!stripped.empty()) {
      specs.push_back(parse_tracker_spec(stripped));
    }
  }
  if (specs.empty()) {
    throw ConfigError("at least one tracker must be selected");
  }
  return specs;
}

inline double overall_mean(const MonteCarloResult& result) {
  double total = 0.0;
  for (double value : result.mean_error) total += value;
  return result.mean_error.empty() ? 0.0 : total / static_cast<double>(result.mean_error.size());
}

inline void print_accuracy_summary(const char* command, const LoadedConfig& loaded, int runs,
                                   const std::vector<TrackerSpec>& specs,
                                   const std::vector<MonteCarloResult>& results) {
  std::printf("%s: config_hash=%016llx seed=%llu runs=%d steps=%d\n", command,
              static_cast<unsigned long long>(loaded.hash),
              static_cast<unsigned long long>(loaded.scenario.rng_seed), runs,
              loaded.scenario.num_steps);
  std::optional<double> baseline;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].label == "ekf_star") {
      baseline = overall_mean(results[i]);
      break;
    }
  }
  std::printf("  %-16s %12s %18s %14s\n", "tracker", "mean_gw", "ratio_vs_ekf_star",
              "s_per_update");
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double mean = overall_mean(results[i]);
    if (baseline && *baseline > 0.0) {
      std::printf("  %-16s %12.4f %18.4f %14.3e\n", specs[i].label.c_str(), mean,
                  mean / *baseline, results[i].seconds_per_update);
    } else {
      std::printf("  %-16s %12.4f %18s %14.3e\n", specs[i].label.c_str(), mean, "-",
                  results[i].seconds_per_update);
    }
  }
}

}  // namespace detail

// Runs the Monte Carlo comparison and writes one CSV row per scan index and
// tracker; a human-readable summary goes to stdout.  Returns the process
// exit code: 0 on success, 2 for configuration problems, 3 for tracker
// failures.
inline int cmd_evaluate(const EvaluateOptions& options) {
  LoadedConfig loaded;
  std::vector<TrackerSpec> specs;
  try {
    if (options.runs < 1) {
      throw ConfigError("--runs must be at least 1");
    }
    if (options.out_path.empty()) {
      throw ConfigError("--out is required");
    }
    loaded = load_scenario_config(options.config_path);
    specs = detail::parse_tracker_list(options.trackers);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "elliptrack: %s\n", e.what());
    return 2;
  }

  std::vector<MonteCarloResult> results;
  try {
    for (const TrackerSpec& spec : specs) {
      results.push_back(run_monte_carlo(loaded.scenario, spec, options.runs));
    }
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "elliptrack: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "elliptrack: tracker failure: %s\n", e.what());
    return 3;
  }

  std::ofstream out(options.out_path);
  if (!out) {
    std::fprintf(stderr, "elliptrack: cannot open output file: %s\n", options.out_path.c_str());
    return 2;
  }
  char header[160];
  std::snprintf(header, sizeof(header), "# elliptrack evaluate config_hash=%016llx seed=%llu runs=%d\n",
                static_cast<unsigned long long>(loaded.hash),
                static_cast<unsigned long long>(loaded.scenario.rng_seed), options.runs);
  out << header << "k,tracker,gw_mean,gw_std\n";
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t k = 0; k < results[i].mean_error.size(); ++k) {
      out << k << ',' << specs[i].label << ',' << detail::format_double(results[i].mean_error[k])
          << ',' << detail::format_double(results[i].std_error[k]) << '\n';
    }
  }
  out.close();

  detail::print_accuracy_summary("evaluate", loaded, options.runs, specs, results);
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  std::string sizes = "10,100,1000";
  int repetitions = 50;
  std::string out_path;
};

struct BenchMeasurement {
  int size = 0;
  double sequential_seconds = 0.0;
  double batch_seconds = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

inline LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 2) {
    throw ContractViolation("a linear fit needs at least two points");
  }
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    syy += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  if (!(sxx > 0.0)) {
    throw ContractViolation("a linear fit needs at least two distinct sizes");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  if (syy > 0.0) {
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double predicted = fit.intercept + fit.slope * xs[i];
      residual += (ys[i] - predicted) * (ys[i] - predicted);
    }
    fit.r_squared = 1.0 - residual / syy;
  }
  return fit;
}

namespace detail {

inline void consume_checksum(double value) {
  static volatile double sink = 0.0;
  sink = sink + value;
}

// Median wall-clock seconds of `update()` over `repetitions` timed calls,
// after three untimed warm-up calls.  The checksum return value keeps the
// optimizer from discarding the work.
template <class Update>
double median_update_seconds(int repetitions, Update&& update) {
  for (int i = 0; i < 3; ++i) {
    consume_checksum(update());
  }
  std::vector<double> samples(static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const double checksum = update();
    samples[static_cast<std::size_t>(r)] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    consume_checksum(checksum);
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

inline TrackState bench_prior() {
  TrackState track;
  track.kinematic.mean = (Vec<6>() << 0.0, 0.0, 5.0, 0.0, 0.0, 0.0).finished();
  track.kinematic.cov =
      (Vec<6>() << 100.0, 100.0, 25.0, 25.0, 1.0, 1.0).finished().asDiagonal();
  track.shape.mean = Vec<3>(0.3, 170.0, 40.0);
  track.shape.cov = Vec<3>(0.02, 400.0, 100.0).asDiagonal();
  return track;
}

inline constexpr std::uint64_t kBenchSeed = 0x5eed0000u;

inline MeasurementBatch bench_batch(int size, const Mat<2>& additive_cov) {
  RandomStream rng(kBenchSeed + static_cast<std::uint64_t>(size));
  const Mat<2> shape = shape_matrix(ShapeParams{0.3, 170.0, 40.0});
  const Mat<2> noise_root = Eigen::LLT<Mat<2>>(additive_cov).matrixL();
  MeasurementBatch batch;
  batch.points.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    batch.points.push_back(shape * rng.uniform_unit_disk() + noise_root * rng.normal2());
  }
  return batch;
}

}  // namespace detail

// Times the sequential and single-linearization batch updates on identical
// fixed synthetic scans of each requested size.  Strictly single threaded.
inline std::vector<BenchMeasurement> measure_update_scaling(const std::vector<int>& sizes,
                                                            int repetitions) {
  if (sizes.empty()) {
    throw ContractViolation("at least one batch size is required");
  }
  for (int size : sizes) {
    if (size < 1) {
      throw ContractViolation("batch sizes must be at least 1");
    }
  }
  if (repetitions < 1) {
    throw ContractViolation("repetitions must be at least 1");
  }

  MemNoiseConfig noise;
  noise.additive_cov = Vec<2>(10000.0, 1600.0).asDiagonal();
  const TrackState prior = detail::bench_prior();
  const BatchUpdateConfig cfg;

  std::vector<BenchMeasurement> measurements;
  measurements.reserve(sizes.size());
  for (int size : sizes) {
    const MeasurementBatch batch = detail::bench_batch(size, noise.additive_cov);
    BenchMeasurement m;
    m.size = size;
    m.sequential_seconds = detail::median_update_seconds(repetitions, [&] {
      const TrackState updated = sequential_update(prior, batch, noise);
      return updated.kinematic.mean.sum() + updated.shape.mean.sum();
    });
    m.batch_seconds = detail::median_update_seconds(repetitions, [&] {
      const TrackState updated = batch_update_yl(prior, batch, noise, cfg);
      return updated.kinematic.mean.sum() + updated.shape.mean.sum();
    });
    measurements.push_back(m);
  }
  return measurements;
}

// Times both update styles across batch sizes, writes the per-size medians
// as CSV, and prints fitted linear-scaling slopes plus their ratio.
inline int cmd_bench_runtime(const BenchOptions& options) {
  std::vector<int> sizes;
  std::vector<BenchMeasurement> measurements;
  try {
    if (options.out_path.empty()) {
      throw ConfigError("--out is required");
    }
    if (options.repetitions < 1) {
      throw ConfigError("--reps must be at least 1");
    }
    for (const std::string& token : detail::split(options.sizes, ',')) {
      const std::string stripped = detail::trim(token);
      if (stripped.empty()) continue;
      const int size = detail::parse_int(stripped, "--sizes");
      if (size < 1) {
        throw ConfigError("--sizes entries must be at least 1");
      }
      sizes.push_back(size);
    }
    if (sizes.empty()) {
      throw ConfigError("--sizes must contain at least one batch size");
    }
    measurements = measure_update_scaling(sizes, options.repetitions);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "elliptrack: %s\n", e.what());
    return 2;
  }

  std::string canonical = "reps=" + std::to_string(options.repetitions) + "\nsizes=";
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    canonical += (i ? "," : "") + std::to_string(sizes[i]);
  }
  canonical += "\n";
  const std::uint64_t hash = fnv1a64(canonical);

  std::ofstream out(options.out_path);
  if (!out) {
    std::fprintf(stderr, "elliptrack: cannot open output file: %s\n", options.out_path.c_str());
    return 2;
  }
  char header[160];
  std::snprintf(header, sizeof(header),
                "# elliptrack bench config_hash=%016llx seed=%llu reps=%d\n",
                static_cast<unsigned long long>(hash),
                static_cast<unsigned long long>(detail::kBenchSeed), options.repetitions);
  out << header << "L,tracker,seconds_per_update\n";
  for (const BenchMeasurement& m : measurements) {
    out << m.size << ",ekf_star," << detail::format_double(m.sequential_seconds) << '\n';
    out << m.size << ",eif_yl," << detail::format_double(m.batch_seconds) << '\n';
  }
  out.close();

  std::printf("bench: config_hash=%016llx reps=%d\n", static_cast<unsigned long long>(hash),
              options.repetitions);
  for (const BenchMeasurement& m : measurements) {
    std::printf("  L=%-6d ekf_star=%.3e s  eif_yl=%.3e s  ratio=%.1f\n", m.size,
                m.sequential_seconds, m.batch_seconds,
                m.batch_seconds > 0.0 ? m.sequential_seconds / m.batch_seconds : 0.0);
  }
  std::vector<double> xs, seq, batch;
  for (const BenchMeasurement& m : measurements) {
    xs.push_back(static_cast<double>(m.size));
    seq.push_back(m.sequential_seconds);
    batch.push_back(m.batch_seconds);
  }
  const bool distinct =
      sizes.size() >= 2 && *std::max_element(sizes.begin(), sizes.end()) !=
                               *std::min_element(sizes.begin(), sizes.end());
  if (distinct) {
    const LinearFit seq_fit = fit_line(xs, seq);
    const LinearFit batch_fit = fit_line(xs, batch);
    std::printf("  ekf_star slope=%.3e s/meas (R^2=%.4f)\n", seq_fit.slope, seq_fit.r_squared);
    std::printf("  eif_yl   slope=%.3e s/meas (R^2=%.4f)\n", batch_fit.slope,
                batch_fit.r_squared);
    if (batch_fit.slope > 0.0) {
      std::printf("  slope ratio (ekf_star / eif_yl) = %.1f\n", seq_fit.slope / batch_fit.slope);
    }
  } else {
    std::printf("  (need at least two distinct sizes for a scaling fit)\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  std::string config_path;
  std::string chunks = "1,2,4,L";
  int runs = 100;
  std::string out_path;
};

// Chunk-count sweep for the chunked batch variant, with the sequential and
// single-linearization trackers as references.
inline int cmd_sweep_chunks(const SweepOptions& options) {
  LoadedConfig loaded;
  std::vector<TrackerSpec> specs;
  try {
    if (options.runs < 1) {
      throw ConfigError("--runs must be at least 1");
    }
    if (options.out_path.empty()) {
      throw ConfigError("--out is required");
    }
    loaded = load_scenario_config(options.config_path);
    specs.push_back(parse_tracker_spec("ekf_star"));
    specs.push_back(parse_tracker_spec("eif_yl"));
    bool any_chunk = false;
    for (const std::string& token : detail::split(options.chunks, ',')) {
      const std::string stripped = detail::trim(token);
      if (stripped.empty()) continue;
      specs.push_back(parse_tracker_spec("eif_y0:U=" + stripped));
      any_chunk = true;
    }
    if (!any_chunk) {
      throw ConfigError("--chunks must contain at least one chunk count");
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "elliptrack: %s\n", e.what());
    return 2;
  }

  std::vector<MonteCarloResult> results;
  try {
    for (const TrackerSpec& spec : specs) {
      results.push_back(run_monte_carlo(loaded.scenario, spec, options.runs));
    }
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "elliptrack: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "elliptrack: tracker failure: %s\n", e.what());
    return 3;
  }

  std::ofstream out(options.out_path);
  if (!out) {
    std::fprintf(stderr, "elliptrack: cannot open output file: %s\n", options.out_path.c_str());
    return 2;
  }
  char header[160];
  std::snprintf(header, sizeof(header),
                "# elliptrack sweep config_hash=%016llx seed=%llu runs=%d\n",
                static_cast<unsigned long long>(loaded.hash),
                static_cast<unsigned long long>(loaded.scenario.rng_seed), options.runs);
  out << header << "k,config,gw_mean\n";
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t k = 0; k < results[i].mean_error.size(); ++k) {
      out << k << ',' << specs[i].label << ','
          << detail::format_double(results[i].mean_error[k]) << '\n';
    }
  }
  out.close();

  detail::print_accuracy_summary("sweep", loaded, options.runs, specs, results);
  return 0;
}

}  // namespace elliptrack
