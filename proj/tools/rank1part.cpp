// rank1part: rank-one partitioning toolbox.
//
// Subcommands: generate (synthetic latent block model datasets), run (one
// extract + denoise pipeline on a matrix file), bench (the full benchmark
// grid from a spec file), evaluate (metrics between two label files).
//
// Exit codes: 0 success, 2 argument/config error, 3 convergence/numerical
// error, 4 I/O error.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "rank1part/rank1part.hpp"

namespace {

int dispatch(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const rank1part::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const rank1part::DegenerateInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const rank1part::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const rank1part::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const rank1part::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const rank1part::SelectionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const rank1part::GenerationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-one partitioning: cluster-generating vectors + Potts denoising"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "generate a synthetic LBM dataset");
  std::string gen_config;
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  generate->add_option("--config", gen_config, "preset name (D1..D4) or config JSON file")
      ->required();
  generate->add_option("--seed", gen_seed, "generation seed");
  generate->add_option("--out", gen_out, "output matrix CSV path")->required();

  // run
  auto* run = app.add_subcommand("run", "run one extract + denoise pipeline");
  std::string run_matrix;
  std::string run_method = "nmf";
  std::string run_step2 = "sorted_potts";
  std::string run_out;
  int run_p = 1;
  std::uint64_t run_seed = 0;
  int run_restarts = 100;
  std::optional<double> run_lambda;
  std::optional<double> run_epsilon;
  std::optional<double> run_eps_thr;
  run->add_option("--matrix", run_matrix, "input matrix CSV")->required();
  run->add_option("--method", run_method,
                  "nmf | ccot | ccot_gw | fiedler | fiedler_ds | pagerank | marginal")
      ->required();
  run->add_option("--step2", run_step2, "potts | sorted_potts | threshold");
  run->add_option("--p", run_p, "Potts fitting norm (1 or 2)");
  run->add_option("--lambda", run_lambda, "Potts jump penalty (default: silhouette-selected)");
  run->add_option("--epsilon", run_epsilon, "entropic regularization for ccot / ccot_gw");
  run->add_option("--eps-thr", run_eps_thr, "gap threshold for step2=threshold");
  run->add_option("--seed", run_seed, "seed for randomized extractors");
  run->add_option("--restarts", run_restarts, "NMF restarts");
  run->add_option("--out", run_out, "output directory")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark spec");
  std::string bench_spec;
  std::optional<int> bench_runs;
  std::optional<std::uint64_t> bench_seed;
  std::optional<double> bench_noise;
  std::optional<std::string> bench_out;
  bench->add_option("spec", bench_spec, "experiment spec JSON file")->required();
  bench->add_option("--runs", bench_runs, "override: number of runs per config");
  bench->add_option("--seed", bench_seed, "override: base seed");
  bench->add_option("--noise-sigma", bench_noise, "override: Gaussian noise level");
  bench->add_option("--out", bench_out, "override: output directory");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "metrics between two label files");
  std::string eval_truth;
  std::string eval_pred;
  evaluate->add_option("--truth", eval_truth, "ground-truth labels CSV")->required();
  evaluate->add_option("--pred", eval_pred, "predicted labels CSV")->required();

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed())
    return dispatch([&] { rank1part::cmd_generate(gen_config, gen_seed, gen_out, std::cout); });

  if (run->parsed())
    return dispatch([&] {
      const auto method = rank1part::method_from_string(run_method);
      if (!method) throw rank1part::ArgumentError("unknown method '" + run_method + "'");
      const auto step2 = rank1part::step2_from_string(run_step2);
      if (!step2) throw rank1part::ArgumentError("unknown step2 '" + run_step2 + "'");
      rank1part::PipelineOptions opts;
      opts.method = *method;
      opts.step2 = *step2;
      opts.p = run_p;
      opts.lambda = run_lambda;
      opts.epsilon = run_epsilon;
      opts.threshold_eps = run_eps_thr;
      opts.seed = run_seed;
      opts.nmf_restarts = run_restarts;
      rank1part::cmd_run(run_matrix, opts, run_out, std::cout);
    });

  if (bench->parsed())
    return dispatch([&] {
      rank1part::ExperimentSpec spec = rank1part::load_experiment_spec(bench_spec);
      if (bench_runs) spec.runs = *bench_runs;
      if (bench_seed) spec.base_seed = *bench_seed;
      if (bench_noise) spec.noise_sigma = *bench_noise;
      if (bench_out) spec.output_dir = *bench_out;
      rank1part::run_bench(spec);
      std::cout << "wrote " << spec.output_dir << "/table1.csv, table1.json, figure4.txt\n";
    });

  if (evaluate->parsed())
    return dispatch([&] { rank1part::cmd_evaluate(eval_truth, eval_pred, std::cout); });

  return 0;
}
