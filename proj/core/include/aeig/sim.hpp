#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aeig/chains.hpp"
#include "aeig/estimation.hpp"
#include "aeig/graph.hpp"
#include "aeig/target.hpp"

namespace aeig {

enum class Strategy { annealed, direct, uniform };

// A trial that could not continue; `step` is the step index that failed.
class TrialFailure : public std::runtime_error {
 public:
  TrialFailure(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

struct SwarmState {
  std::vector<NodeIndex> positions;  // positions[a] = region of robot a
  std::size_t step = 0;
};

/// Everything one trial needs; the ground truth is already drawn.
struct TrialSetup {
  RegionGraph graph;
  GroundTruth truth;
  std::size_t n_robots = 30;
  std::size_t horizon = 500;
  AnnealingSchedule schedule;
  PlannerKind planner = PlannerKind::remc;
  SolverOptions solver;
  NodeIndex start_region = 0;
  bool record_positions = false;
};

/// Per-step series of one trial. Row k is recorded after the samples of
/// step k have been absorbed, before the robots move.
struct TrialMetrics {
  std::vector<double> h_true;                   // max_i ln(sigma_i^2 / max(visits_i, 1))
  std::vector<double> h_est;                    // max_i ln(sigma_bar_i^2 / nu_i)
  std::vector<std::vector<double>> rho_bar;     // commanded target
  std::vector<std::vector<double>> rho_hat;     // pooled visitation frequency
  std::vector<std::vector<std::size_t>> visits; // real samples per region
  std::vector<std::vector<NodeIndex>> positions;  // [k][a], only when recorded
  std::size_t chain_fallbacks = 0;

  std::size_t horizon() const { return h_true.size(); }
};

TrialMetrics run_trial(const TrialSetup& setup, Strategy strategy, std::uint64_t seed);

double true_max_entropy(const GroundTruth& truth, std::span<const std::size_t> visits);
double estimated_max_entropy(const NigState& state);
// General form: max_i ln(variance_i / max(count_i, 1)).
double max_log_ratio(std::span<const double> variance, std::span<const double> counts);

// Pooled visitation frequency of a position history [k][a].
TargetDistribution time_average(std::span<const std::vector<NodeIndex>> history,
                                std::size_t n_regions);

struct Quartiles {
  std::vector<double> q1;
  std::vector<double> median;
  std::vector<double> q3;
};

struct QuartileSummary {
  std::size_t n_trials = 0;
  Quartiles h_true;
  Quartiles h_est;
  Quartiles gap;  // h_true - h_est

  std::size_t horizon() const { return h_true.median.size(); }
};

// Quantile by linear interpolation between order statistics at
// position p * (n - 1) (the "type 7" rule).
double quantile(std::vector<double> values, double p);

inline constexpr std::string_view kQuantileRule =
    "linear interpolation between order statistics at p*(n-1)";

QuartileSummary aggregate_trials(std::span<const TrialMetrics> trials);

}  // namespace aeig
