#include "aeig/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace aeig {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::annealed: return "annealed";
    case Strategy::direct: return "direct";
    case Strategy::uniform: return "uniform";
  }
  return "annealed";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "annealed") return Strategy::annealed;
  if (text == "direct") return Strategy::direct;
  if (text == "uniform") return Strategy::uniform;
  throw std::invalid_argument("unknown strategy '" + std::string(text) +
                              "' (expected annealed, direct or uniform)");
}

double max_log_ratio(std::span<const double> variance, std::span<const double> counts) {
  if (variance.size() != counts.size() || variance.empty()) {
    throw std::invalid_argument("max_log_ratio: size mismatch");
  }
  double h = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < variance.size(); ++i) {
    h = std::max(h, std::log(variance[i] / std::max(counts[i], 1.0)));
  }
  return h;
}

double true_max_entropy(const GroundTruth& truth, std::span<const std::size_t> visits) {
  std::vector<double> counts(visits.begin(), visits.end());
  return max_log_ratio(truth.variance, counts);
}

double estimated_max_entropy(const NigState& state) {
  return max_log_ratio(recover_variance(state), state.nu);
}

TargetDistribution time_average(std::span<const std::vector<NodeIndex>> history,
                                std::size_t n_regions) {
  if (history.empty()) throw std::invalid_argument("time_average: empty history");
  std::vector<double> counts(n_regions, 0.0);
  double total = 0.0;
  for (const auto& step : history) {
    for (NodeIndex r : step) {
      if (r >= n_regions) throw std::out_of_range("time_average: region index out of range");
      counts[r] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) throw std::invalid_argument("time_average: no robots in history");
  for (double& c : counts) c /= total;
  return TargetDistribution(std::move(counts));
}

TrialMetrics run_trial(const TrialSetup& setup, Strategy strategy, std::uint64_t seed) {
  const RegionGraph& graph = setup.graph;
  const std::size_t n = graph.size();
  if (!validate(graph)) throw std::invalid_argument("run_trial: graph is not valid");
  if (setup.n_robots == 0) throw std::invalid_argument("run_trial: need at least one robot");
  if (setup.horizon == 0) throw std::invalid_argument("run_trial: horizon must be positive");
  if (!(setup.schedule.alpha > 0.0)) throw std::invalid_argument("run_trial: alpha must be positive");
  if (setup.start_region >= n) throw std::invalid_argument("run_trial: start region out of range");
  if (setup.truth.size() != n || setup.truth.variance.size() != n) {
    throw std::invalid_argument("run_trial: ground truth does not match the graph");
  }

  std::vector<Rng> robot_rng;
  robot_rng.reserve(setup.n_robots);
  for (std::size_t a = 0; a < setup.n_robots; ++a) {
    robot_rng.push_back(make_stream(seed, kRobotStreamBase + a));
  }

  SwarmState swarm{std::vector<NodeIndex>(setup.n_robots, setup.start_region), 0};
  NigState nig = nig_init(n);
  std::vector<std::size_t> visits(n, 0);
  ChainPlanner planner(graph, setup.planner, setup.solver);

  TrialMetrics m;
  m.h_true.reserve(setup.horizon);
  m.h_est.reserve(setup.horizon);
  m.rho_bar.reserve(setup.horizon);
  m.rho_hat.reserve(setup.horizon);
  m.visits.reserve(setup.horizon);

  const double samples_per_step = static_cast<double>(setup.n_robots);
  for (std::size_t k = 0; k < setup.horizon; ++k) {
    swarm.step = k;
    if (setup.record_positions) m.positions.push_back(swarm.positions);

    // Sampling: every robot observes its current region, in robot order.
    for (std::size_t a = 0; a < setup.n_robots; ++a) {
      const NodeIndex r = swarm.positions[a];
      nig_update(nig, r, observe(setup.truth, r, robot_rng[a]));
      ++visits[r];
    }
    const std::vector<double> sigma2 = recover_variance(nig);

    m.h_true.push_back(true_max_entropy(setup.truth, visits));
    m.h_est.push_back(max_log_ratio(sigma2, nig.nu));
    std::vector<double> hat(n);
    const double total = samples_per_step * static_cast<double>(k + 1);
    for (std::size_t i = 0; i < n; ++i) hat[i] = static_cast<double>(visits[i]) / total;
    m.rho_hat.push_back(std::move(hat));
    m.visits.push_back(visits);

    // Planning.
    TargetDistribution target;
    switch (strategy) {
      case Strategy::annealed: target = gibbs_target(sigma2, setup.schedule.beta_at(k)); break;
      case Strategy::direct: target = direct_target(sigma2); break;
      case Strategy::uniform: target = uniform_target(n); break;
    }
    m.rho_bar.push_back(target.vector());

    const TransitionMatrix* chain = nullptr;
    try {
      chain = &planner.plan(target);
    } catch (const std::exception& e) {
      throw TrialFailure(k, "chain synthesis failed at step " + std::to_string(k) + ": " + e.what());
    }

    for (std::size_t a = 0; a < setup.n_robots; ++a) {
      swarm.positions[a] = sample_next(*chain, swarm.positions[a], robot_rng[a]);
    }
  }
  if (setup.record_positions) m.positions.push_back(swarm.positions);
  m.chain_fallbacks = planner.fallbacks();
  return m;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile: no values");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

void push_quartiles(Quartiles& q, const std::vector<double>& column) {
  q.q1.push_back(quantile(column, 0.25));
  q.median.push_back(quantile(column, 0.5));
  q.q3.push_back(quantile(column, 0.75));
}

}  // namespace

QuartileSummary aggregate_trials(std::span<const TrialMetrics> trials) {
  if (trials.empty()) throw std::invalid_argument("aggregate_trials: no trials");
  const std::size_t horizon = trials.front().horizon();
  for (const auto& t : trials) {
    if (t.horizon() != horizon) throw std::invalid_argument("aggregate_trials: mismatched horizons");
  }
  QuartileSummary s;
  s.n_trials = trials.size();
  std::vector<double> ht(trials.size()), he(trials.size()), gap(trials.size());
  for (std::size_t k = 0; k < horizon; ++k) {
    for (std::size_t t = 0; t < trials.size(); ++t) {
      ht[t] = trials[t].h_true[k];
      he[t] = trials[t].h_est[k];
      gap[t] = ht[t] - he[t];
    }
    push_quartiles(s.h_true, ht);
    push_quartiles(s.h_est, he);
    push_quartiles(s.gap, gap);
  }
  return s;
}

}  // namespace aeig
