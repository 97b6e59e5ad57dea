// Command-line experiment runner: generates or loads a linear system, runs
// the selected row-action rules, and writes CSV traces, summaries, and rate
// bounds.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kaczmarz/kaczmarz.hpp"

namespace {

constexpr int kExitBadArguments = 2;
constexpr int kExitIoFailure = 3;
constexpr int kExitNumericalFailure = 4;

struct MatrixFlags {
  std::string matrix = "gaussian-shifted";
  std::size_t m = 200;
  std::size_t n = 200;
  double shift = 100.0;
  std::string path;
  std::string rhs;
};

void add_matrix_flags(CLI::App* cmd, MatrixFlags& flags) {
  cmd->add_option("--matrix", flags.matrix, "matrix source")
      ->check(CLI::IsMember({"gaussian", "gaussian-shifted", "file"}))
      ->capture_default_str();
  cmd->add_option("--m", flags.m, "row count (gaussian)")
      ->capture_default_str();
  cmd->add_option("--n", flags.n, "column count")->capture_default_str();
  cmd->add_option("--shift", flags.shift, "diagonal shift (gaussian-shifted)")
      ->capture_default_str();
  cmd->add_option("--path", flags.path, "matrix file (matrix=file)");
  cmd->add_option("--rhs", flags.rhs, "right-hand-side file (matrix=file)");
}

kaczmarz::MatrixSource make_source(const MatrixFlags& flags) {
  if (flags.matrix == "gaussian")
    return kaczmarz::GaussianSource{flags.m, flags.n};
  if (flags.matrix == "gaussian-shifted")
    return kaczmarz::ShiftedGaussianSource{flags.n, flags.shift};
  if (flags.path.empty() || flags.rhs.empty())
    throw kaczmarz::GeneratorError("--matrix file needs --path and --rhs");
  return kaczmarz::FileSource{flags.path, flags.rhs};
}

int dispatch(int argc, char** argv) {
  CLI::App app{"weighted randomized Kaczmarz experiment harness"};
  app.require_subcommand(1);

  MatrixFlags run_matrix;
  std::string rules_text = "uniform,p:1,p:2,p:20";
  std::string strategy = "gram";
  kaczmarz::ExperimentSpec run_spec;

  CLI::App* run = app.add_subcommand("run", "solve and write trace CSVs");
  add_matrix_flags(run, run_matrix);
  run->add_option("--rules", rules_text,
                  "comma list: uniform,cyclic,max,norm,p:<value>")
      ->capture_default_str();
  run->add_option("--iters", run_spec.iters, "iteration budget per trial")
      ->capture_default_str();
  run->add_option("--trials", run_spec.trials, "independent trials per rule")
      ->capture_default_str();
  run->add_option("--seed", run_spec.base_seed, "base seed")
      ->capture_default_str();
  run->add_option("--trace-every", run_spec.trace_every,
                  "checkpoint interval")
      ->capture_default_str();
  run->add_option("--strategy", strategy, "residual strategy")
      ->check(CLI::IsMember({"gram", "direct"}))
      ->capture_default_str();
  run->add_option("--stop-tol", run_spec.stop_tol,
                  "stop when the residual sup-norm drops below this")
      ->capture_default_str();
  run->add_flag("--track-sv", run_spec.track_sv,
                "track alignment with the smallest singular vector");
  run->add_option("--out", run_spec.out_dir, "output directory")->required();

  MatrixFlags bounds_matrix;
  std::string p_values_text = "1,2,20";
  kaczmarz::ExperimentSpec bounds_spec;

  CLI::App* bounds =
      app.add_subcommand("bounds", "rate quantities for the matrix");
  add_matrix_flags(bounds, bounds_matrix);
  bounds->add_option("--p-values", p_values_text, "comma list of exponents")
      ->capture_default_str();
  bounds->add_option("--seed", bounds_spec.base_seed, "base seed")
      ->capture_default_str();
  bounds->add_option("--restarts", bounds_spec.restarts,
                     "minimizer restarts per p")
      ->capture_default_str();
  bounds->add_option("--out", bounds_spec.out_dir, "output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadArguments;
  }

  if (run->parsed()) {
    run_spec.source = make_source(run_matrix);
    run_spec.rules = kaczmarz::parse_rules(rules_text);
    run_spec.strategy = strategy == "direct"
                            ? kaczmarz::ResidualStrategy::DirectRecompute
                            : kaczmarz::ResidualStrategy::GramUpdate;
    const kaczmarz::RunOutputs outputs = kaczmarz::run_experiment(run_spec);
    std::cout << outputs.summary_file.string() << '\n';
  } else {
    bounds_spec.source = make_source(bounds_matrix);
    bounds_spec.p_values = kaczmarz::parse_p_values(p_values_text);
    const kaczmarz::BoundsOutputs outputs =
        kaczmarz::report_bounds(bounds_spec);
    std::cout << outputs.bounds_file.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const kaczmarz::FloorViolated& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const kaczmarz::SingularOrIllConditioned& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const kaczmarz::BadMatrixFile& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoFailure;
  } catch (const kaczmarz::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoFailure;
  } catch (const kaczmarz::ZeroRowError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoFailure;  // unusable equation in the input data
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadArguments;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  }
}
