// Command-line entry point. Subcommands delegate to dmrnn/cli.hpp; this
// file only parses flags and maps errors to exit codes (0 ok, 1 runtime
// failure, 2 usage).

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dmrnn/cli.hpp"
#include "dmrnn/errors.hpp"

namespace {

bool parse_bipartite(const std::string& text, dmrnn::BipartiteDims& dims) {
  const auto x = text.find('x');
  if (x == std::string::npos) return false;
  try {
    dims.d_a = std::stoi(text.substr(0, x));
    dims.d_b = std::stoi(text.substr(x + 1));
  } catch (const std::exception&) {
    return false;
  }
  return dims.d_a >= 1 && dims.d_b >= 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"density-matrix recurrent sequence model toolkit"};
  app.require_subcommand(1);

  dmrnn::VerifyOptions verify_opt;
  CLI::App* verify = app.add_subcommand(
      "verify", "run the randomized CPTP/POVM/entropy/QMI property suites");
  verify->add_option("--trials", verify_opt.trials, "trials per suite")
      ->check(CLI::PositiveNumber);
  verify->add_option("--d", verify_opt.d, "Hilbert dimension")
      ->check(CLI::Range(1, 16));
  verify->add_option("--tol", verify_opt.tol, "construction tolerance");
  verify->add_option("--seed", verify_opt.seed, "base seed");

  dmrnn::DemoOptions demo_opt;
  demo_opt.output_dir = ".";
  CLI::App* demo = app.add_subcommand("demo", "emit a worked example as CSV");
  demo->add_option("--name", demo_opt.name, "ambiguity|coherence|bell")
      ->required()
      ->check(CLI::IsMember({"ambiguity", "coherence", "bell"}));
  demo->add_option("--out", demo_opt.output_dir, "output directory");

  dmrnn::TrainOptions train_opt;
  train_opt.output_dir = ".";
  CLI::App* train = app.add_subcommand("train", "fit a model from a JSON run description");
  train->add_option("--config", train_opt.config_path, "run description JSON")
      ->required();
  train->add_option("--out", train_opt.output_dir, "output directory");

  dmrnn::RunOptions run_opt;
  run_opt.output_dir = ".";
  std::string bipartite_text;
  CLI::App* run = app.add_subcommand("run", "forward pass over a token file");
  run->add_option("--checkpoint", run_opt.checkpoint_path, "checkpoint JSON")
      ->required();
  run->add_option("--tokens", run_opt.tokens_path, "token file, one per line")
      ->required();
  run->add_option("--out", run_opt.output_dir, "output directory");
  run->add_option("--bipartite", bipartite_text,
                  "voice dimensions d_a x d_b, e.g. 2x2");

  dmrnn::BenchOptions bench_opt;
  CLI::App* bench = app.add_subcommand(
      "bench", "time factor normalization vs Choi eigendecomposition");
  bench->add_option("--d", bench_opt.d_values, "comma-separated dimensions")
      ->required()
      ->delimiter(',');
  bench->add_option("--reps", bench_opt.reps, "repetitions per dimension")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_opt.seed, "factor seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return dmrnn::kExitUsage;
  }

  try {
    if (verify->parsed()) return dmrnn::cmd_verify(verify_opt, std::cout);
    if (demo->parsed()) return dmrnn::cmd_demo(demo_opt, std::cout);
    if (train->parsed()) return dmrnn::cmd_train(train_opt, std::cout);
    if (run->parsed()) {
      if (!bipartite_text.empty()) {
        dmrnn::BipartiteDims dims;
        if (!parse_bipartite(bipartite_text, dims)) {
          std::cerr << "run: --bipartite expects AxB with positive integers\n";
          return dmrnn::kExitUsage;
        }
        run_opt.bipartite = dims;
      }
      return dmrnn::cmd_run(run_opt, std::cout);
    }
    if (bench->parsed()) return dmrnn::cmd_bench(bench_opt, std::cout);
  } catch (const dmrnn::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dmrnn::kExitUsage;
  } catch (const dmrnn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dmrnn::kExitFailure;
  }
  return dmrnn::kExitUsage;
}
