#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aeig/chains.hpp"
#include "aeig/config.hpp"
#include "aeig/sim.hpp"
#include "aeig/tables.hpp"

namespace aeig {

// Output directory used when none is given on the command line.
inline constexpr const char* kOutputDirEnv = "AEIG_OUTPUT_DIR";
std::filesystem::path default_output_dir();

std::string code_version();

inline std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial) {
  return base_seed + trial;
}

struct RunFailure {
  Strategy strategy = Strategy::annealed;
  PlannerKind planner = PlannerKind::remc;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> step;
  std::string message;
};

struct RunReport {
  std::filesystem::path directory;
  bool complete = false;
  std::optional<RunFailure> failure;
  double wall_clock_seconds = 0.0;
  std::size_t trials_written = 0;
};

/// Runs every (strategy, planner) pair for config.trials seeded trials and
/// writes the bundle:
///   config.yaml, manifest.json,
///   trials/<strategy>_<planner>/trial_NNNN.csv, aggregate/<strategy>_<planner>.csv
/// Tables are byte-identical for any `jobs` value.
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         unsigned jobs = 1);

// Per (strategy, planner) aggregates read back from a complete bundle.
struct BundleAggregates {
  ExperimentConfig config;
  std::vector<AggregateTable> tables;

  const AggregateTable* find(Strategy s, PlannerKind p) const;
};

BundleAggregates load_bundle(const std::filesystem::path& dir);

// Prints per-strategy final-step and transient-window medians of h, then
// pairwise verdicts per planner. Throws TableError / std::runtime_error on a
// missing or incomplete bundle.
void summarize(const std::filesystem::path& dir, std::ostream& os);

// Files whose recorded digest no longer matches; empty when the bundle is intact.
std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

std::string sha256_hex(const std::string& bytes);

// Window helpers over per-step series, inclusive bounds clipped to the series.
struct StepWindow {
  std::size_t first = 20;
  std::size_t last = 200;
};
double window_mean(const std::vector<double>& series, StepWindow w);
double window_median(const std::vector<double>& series, StepWindow w);
// Fraction of steps in the window with a[k] <= b[k].
double fraction_leq(const std::vector<double>& a, const std::vector<double>& b, StepWindow w);

/// Target requested from the synth-chain debug command.
struct TargetRequest {
  enum class Kind { uniform, optimal, gibbs } kind = Kind::uniform;
  double beta = 1.0;
};
TargetRequest parse_target_request(const std::string& text);

struct SynthesizedChain {
  TargetDistribution target;
  ChainResult result;
  PlannerKind planner = PlannerKind::remc;
};

// Gibbs and optimal targets use the ground truth drawn from base_seed.
SynthesizedChain synthesize_chain(const ExperimentConfig& config, const TargetRequest& request);

}  // namespace aeig
