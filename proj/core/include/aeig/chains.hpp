#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string_view>

#include <Eigen/Dense>

#include "aeig/graph.hpp"
#include "aeig/rng.hpp"
#include "aeig/target.hpp"

namespace aeig {

class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column-stochastic transition matrix: entry (i, j) is the probability of
/// moving to region i from region j, so distributions evolve as rho' = P rho.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  explicit TransitionMatrix(Eigen::MatrixXd p);

  std::size_t size() const { return static_cast<std::size_t>(p_.rows()); }
  double operator()(NodeIndex to, NodeIndex from) const {
    return p_(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from));
  }
  const Eigen::MatrixXd& matrix() const { return p_; }

 private:
  Eigen::MatrixXd p_;
};

struct ChainDiagnostics {
  double column_sum_residual = 0.0;    // max_j |sum_i P_ij - 1|
  double min_entry = 0.0;
  double support_violation = 0.0;      // max |P_ij| over (j, i) not in E
  double stationarity_residual = 0.0;  // ||P rho - rho||_inf
  double remc_objective = 0.0;
  double slem = 0.0;
  bool slem_from_symmetrized = false;  // P~ was not symmetric; slem is of (P~ + P~^T) / 2
  bool irreducible = false;
  bool aperiodic = false;
  std::size_t period = 0;

  bool ergodic() const { return irreducible && aperiodic; }
  bool feasible(double tol = 1e-8) const {
    return column_sum_residual < tol && support_violation == 0.0 && stationarity_residual < tol &&
           min_entry >= 0.0;
  }
};

enum class PlannerKind { remc, fmmc, metropolis_hastings };

std::string_view to_string(PlannerKind kind);
PlannerKind parse_planner_kind(std::string_view text);

/// Projected-subgradient solver settings shared by REMC and FMMC.
struct SolverOptions {
  int max_iterations = 5000;
  int patience = 50;                  // stop after this many iterations without improvement
  double improvement_tolerance = 1e-6;
  double projection_tolerance = 1e-9;
  int max_projection_iterations = 20000;
  double initial_step = 0.5;
  bool warm_start = true;             // reuse the previous chain across planner calls
};

struct ChainResult {
  TransitionMatrix matrix;
  ChainDiagnostics diagnostics;
  int iterations = 0;
};

// Targets with entries below this are floored and renormalized before synthesis.
inline constexpr double kTargetFloor = 1e-12;
TargetDistribution floor_target(const TargetDistribution& target);

// Uniform-proposal Metropolis-Hastings over non-self neighbors; reversible
// with stationary distribution `target`.
TransitionMatrix metropolis_hastings(const RegionGraph& graph, const TargetDistribution& target);

// Minimizes lambda_max((P~ + P~^T)/2 - 2 sqrt(rho) sqrt(rho)^T) with
// P~ = diag(rho^-1/2) P diag(rho^1/2) over stochastic, rho-stationary chains
// supported on E. The result never scores worse than the M-H chain.
ChainResult remc_solve(const RegionGraph& graph, const TargetDistribution& target,
                       const SolverOptions& options = {},
                       const TransitionMatrix* warm_start = nullptr);

// Minimizes the SLEM ||P~ - sqrt(rho) sqrt(rho)^T||_2 over reversible chains
// with the same constraints.
ChainResult fmmc_solve(const RegionGraph& graph, const TargetDistribution& target,
                       const SolverOptions& options = {},
                       const TransitionMatrix* warm_start = nullptr);

double remc_objective(const TransitionMatrix& p, const TargetDistribution& target);

// Second-largest eigenvalue modulus of P~. When P~ is not symmetric within
// 1e-8 the value is taken from its symmetric part and *from_symmetrized is set.
double slem(const TransitionMatrix& p, const TargetDistribution& target,
            bool* from_symmetrized = nullptr);

// Period of the support graph of P (entries > tol); 0 if not irreducible.
std::size_t chain_period(const TransitionMatrix& p, double tol = 1e-12);

ChainDiagnostics validate_chain(const TransitionMatrix& p, const RegionGraph& graph,
                                const TargetDistribution& target);

// Power iteration from uniform; throws ChainError for periodic or reducible
// chains and when the iteration cap is hit.
TargetDistribution stationary_distribution(const TransitionMatrix& p);

// Inverse-CDF draw from column `current`.
NodeIndex sample_next(const TransitionMatrix& p, NodeIndex current, Rng& rng);

// Plain-text block: a header line stating the convention, then one
// space-separated row per destination region.
void write_matrix(std::ostream& os, const TransitionMatrix& p);
void write_diagnostics(std::ostream& os, const ChainDiagnostics& d);

/// Synthesizes a chain per call, remembering the previous output as the warm
/// start when options.warm_start is on. Periodic or reducible solver output is
/// replaced by the Metropolis-Hastings chain for that target.
class ChainPlanner {
 public:
  ChainPlanner(RegionGraph graph, PlannerKind kind, SolverOptions options = {});

  const TransitionMatrix& plan(const TargetDistribution& target);

  PlannerKind kind() const { return kind_; }
  std::size_t fallbacks() const { return fallbacks_; }
  const ChainDiagnostics& last_diagnostics() const { return last_diagnostics_; }

 private:
  RegionGraph graph_;
  PlannerKind kind_;
  SolverOptions options_;
  std::optional<TransitionMatrix> previous_;
  std::optional<TargetDistribution> previous_target_;
  ChainDiagnostics last_diagnostics_;
  std::size_t fallbacks_ = 0;
};

}  // namespace aeig
