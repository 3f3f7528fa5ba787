// Command-line benchmark harness for the elliptrack library.
//
//   elliptrack evaluate --config <file> [--trackers a,b,...] [--runs N] --out <csv>
//   elliptrack bench    [--sizes 10,100,1000] [--reps N] --out <csv>
//   elliptrack sweep    --config <file> [--chunks 1,2,4,L] [--runs N] --out <csv>
//
// Exit codes: 0 success, 2 configuration problem, 3 tracker failure.

#include "CLI11.hpp"

#include "elliptrack/bench_cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"elliptical extended-object tracking benchmark harness"};
  app.require_subcommand(1);

  elliptrack::EvaluateOptions evaluate_options;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Monte Carlo accuracy comparison of the tracker variants");
  evaluate->add_option("--config", evaluate_options.config_path, "scenario configuration file")
      ->required();
  evaluate->add_option("--trackers", evaluate_options.trackers,
                       "comma-separated list: ekf_star, eif_yl, eif_y0:U=<n|L>");
  evaluate->add_option("--runs", evaluate_options.runs, "number of Monte Carlo runs");
  evaluate->add_option("--out", evaluate_options.out_path, "output CSV path")->required();

  elliptrack::BenchOptions bench_options;
  CLI::App* bench =
      app.add_subcommand("bench", "runtime scaling of the sequential vs. batch update");
  bench->add_option("--sizes", bench_options.sizes, "comma-separated batch sizes");
  bench->add_option("--reps", bench_options.repetitions, "timed repetitions per size");
  bench->add_option("--out", bench_options.out_path, "output CSV path")->required();

  elliptrack::SweepOptions sweep_options;
  CLI::App* sweep =
      app.add_subcommand("sweep", "chunk-count sweep for the chunked batch update");
  sweep->add_option("--config", sweep_options.config_path, "scenario configuration file")
      ->required();
  sweep->add_option("--chunks", sweep_options.chunks,
                    "comma-separated chunk counts (integers or L)");
  sweep->add_option("--runs", sweep_options.runs, "number of Monte Carlo runs");
  sweep->add_option("--out", sweep_options.out_path, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (evaluate->parsed()) {
    return elliptrack::cmd_evaluate(evaluate_options);
  }
  if (bench->parsed()) {
    return elliptrack::cmd_bench_runtime(bench_options);
  }
  if (sweep->parsed()) {
    return elliptrack::cmd_sweep_chunks(sweep_options);
  }
  return 2;
}
