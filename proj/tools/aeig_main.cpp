// aeig: experiment runner for annealed ergodic information gathering.
//
//   aeig run <config> [--out DIR] [--jobs J]
//   aeig summarize <DIR>
//   aeig validate-config <config>
//   aeig synth-chain <config> --target uniform|optimal|gibbs:BETA
//   aeig verify <DIR>
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "aeig/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

int report_config_error(const aeig::ConfigError& e) {
  for (const auto& m : e.messages()) std::cerr << "config error: " << m << '\n';
  return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annealed ergodic multi-robot information gathering: trial runner and tools"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "Run all strategy/planner trials of an experiment config");
  run->add_option("config", config_path, "Experiment config (YAML)")->required();
  run->add_option("--out", out_dir, "Output directory (default $AEIG_OUTPUT_DIR or ./results)");
  run->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::Range(1u, 1024u));

  std::string bundle_dir;
  auto* summarize = app.add_subcommand("summarize", "Print medians and ordering verdicts of a bundle");
  summarize->add_option("dir", bundle_dir, "Results directory")->required();

  auto* validate = app.add_subcommand("validate-config", "Check a config and print it with defaults");
  validate->add_option("config", config_path, "Experiment config (YAML)")->required();

  std::string target_text;
  auto* synth = app.add_subcommand("synth-chain", "Synthesize one transition matrix and print diagnostics");
  synth->add_option("config", config_path, "Experiment config (YAML)")->required();
  synth->add_option("--target", target_text, "uniform | optimal | gibbs:BETA")->required();

  auto* verify = app.add_subcommand("verify", "Recompute the content digests listed in a bundle manifest");
  verify->add_option("dir", bundle_dir, "Results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) {
      const aeig::ExperimentConfig config = aeig::load_config(config_path);
      const std::filesystem::path dir = out_dir.empty() ? aeig::default_output_dir() : std::filesystem::path(out_dir);
      const aeig::RunReport report = aeig::run_experiment(config, dir, jobs);
      if (!report.complete) {
        const auto& f = *report.failure;
        std::cerr << "run failed: strategy " << aeig::to_string(f.strategy) << ", planner "
                  << aeig::to_string(f.planner) << ", seed " << f.seed;
        if (f.step) std::cerr << ", step " << *f.step;
        std::cerr << ": " << f.message << '\n';
        return kExitFailure;
      }
      std::cout << "wrote " << report.trials_written << " trial tables to " << dir.string() << " in "
                << report.wall_clock_seconds << " s\n";
    } else if (*summarize) {
      aeig::summarize(bundle_dir, std::cout);
    } else if (*validate) {
      const aeig::ExperimentConfig config = aeig::load_config(config_path);
      std::cout << aeig::write_config(config);
    } else if (*synth) {
      const aeig::ExperimentConfig config = aeig::load_config(config_path);
      aeig::TargetRequest request;
      try {
        request = aeig::parse_target_request(target_text);
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
      }
      const aeig::SynthesizedChain chain = aeig::synthesize_chain(config, request);
      std::cout << "# planner " << aeig::to_string(chain.planner) << "\n# target";
      std::cout.precision(17);
      for (double r : chain.target.values()) std::cout << ' ' << r;
      std::cout << '\n';
      aeig::write_matrix(std::cout, chain.result.matrix);
      aeig::write_diagnostics(std::cout, chain.result.diagnostics);
    } else if (*verify) {
      const auto mismatches = aeig::verify_manifest(bundle_dir);
      for (const auto& m : mismatches) std::cerr << m << '\n';
      if (!mismatches.empty()) return kExitFailure;
      std::cout << "all digests match\n";
    }
  } catch (const aeig::ConfigError& e) {
    return report_config_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
