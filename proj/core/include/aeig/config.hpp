#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aeig/chains.hpp"
#include "aeig/graph.hpp"
#include "aeig/sim.hpp"
#include "aeig/target.hpp"

namespace aeig {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

enum class DrawMode { fixed, per_trial };

struct GraphSpec {
  std::size_t n_regions = 7;
  std::vector<std::pair<NodeIndex, NodeIndex>> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4},
                                                        {4, 5}, {5, 6}, {6, 0}, {1, 4}};
  bool self_loops = true;

  RegionGraph build() const { return RegionGraph::from_undirected(n_regions, edges, self_loops); }
  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

struct GroundTruthSpec {
  // Variances are drawn from the half-open (low, high], means from (low, high].
  double variance_low = 0.0;
  double variance_high = 20.0;
  double mean_low = -10.0;
  double mean_high = 10.0;
  bool scale_noise_by_robots = true;  // variance *= n_robots
  DrawMode draw_mode = DrawMode::fixed;

  friend bool operator==(const GroundTruthSpec&, const GroundTruthSpec&) = default;
};

struct ExperimentConfig {
  GraphSpec graph;
  std::size_t n_robots = 30;
  std::size_t horizon = 500;
  double alpha = 0.025;
  ScheduleKind schedule = ScheduleKind::first_order;
  std::size_t trials = 100;
  std::uint64_t base_seed = 1;
  std::vector<Strategy> strategies = {Strategy::annealed, Strategy::direct, Strategy::uniform};
  std::vector<PlannerKind> planners = {PlannerKind::remc};
  GroundTruthSpec ground_truth;
  NodeIndex start_region = 0;
  SolverOptions solver;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
};

// Field-level problems; empty when the config is usable.
std::vector<std::string> validate_config(const ExperimentConfig& config);

// YAML key-value tree. Missing keys take defaults, unknown keys are errors.
// Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string write_config(const ExperimentConfig& config);

std::string_view to_string(DrawMode mode);

// Ground truth for one trial. In fixed mode the draw depends only on
// base_seed; in per_trial mode on the trial seed.
GroundTruth draw_ground_truth(const ExperimentConfig& config, std::uint64_t trial_seed);

TrialSetup make_trial_setup(const ExperimentConfig& config, PlannerKind planner,
                            std::uint64_t trial_seed);

}  // namespace aeig
