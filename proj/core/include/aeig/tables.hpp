#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "aeig/chains.hpp"
#include "aeig/sim.hpp"

namespace aeig {

// Comma-separated tables with a one-line header. Numbers are printed with
// 17 significant digits so a table round-trips exactly.
//
// Trial table columns:
//   k,strategy,planner,trial,h_true,h_est,rho_bar_0..rho_bar_{n-1},rho_hat_0..rho_hat_{n-1}
// Aggregate table columns:
//   k,strategy,planner,n_trials,h_true_q1,h_true_median,h_true_q3,
//   h_est_q1,h_est_median,h_est_q3,gap_q1,gap_median,gap_q3

class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrialTable {
  Strategy strategy = Strategy::annealed;
  PlannerKind planner = PlannerKind::remc;
  std::size_t trial = 0;
  std::size_t n_regions = 0;
  std::vector<double> h_true;
  std::vector<double> h_est;
  std::vector<std::vector<double>> rho_bar;
  std::vector<std::vector<double>> rho_hat;
};

struct AggregateTable {
  Strategy strategy = Strategy::annealed;
  PlannerKind planner = PlannerKind::remc;
  QuartileSummary summary;
};

std::string trial_table_header(std::size_t n_regions);
std::string aggregate_table_header();

void write_trial_table(std::ostream& os, Strategy strategy, PlannerKind planner, std::size_t trial,
                       const TrialMetrics& metrics);
void write_aggregate_table(std::ostream& os, Strategy strategy, PlannerKind planner,
                           const QuartileSummary& summary);

// Parse errors name the file and line.
TrialTable read_trial_table(const std::filesystem::path& path);
AggregateTable read_aggregate_table(const std::filesystem::path& path);

}  // namespace aeig
