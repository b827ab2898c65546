#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "aeig/sim.hpp"
#include "support/generators.hpp"

namespace aeig {
namespace {

TrialSetup demo_setup(PlannerKind planner, std::size_t horizon, std::size_t robots = 30) {
  TrialSetup s{.graph = demo_graph(),
               .truth = {{1, 2, 3, 4, 5, 6, 7}, {30, 150, 60, 300, 90, 450, 600}}};
  s.planner = planner;
  s.horizon = horizon;
  s.n_robots = robots;
  return s;
}

TEST(RunTrial, SingleRegionEveryoneStays) {
  TrialSetup s{.graph = RegionGraph::from_undirected(1, {}, true), .truth = {{0.0}, {8.0}}};
  s.n_robots = 4;
  s.horizon = 25;
  s.record_positions = true;
  for (Strategy strategy : {Strategy::annealed, Strategy::direct, Strategy::uniform}) {
    const TrialMetrics m = run_trial(s, strategy, 3);
    for (std::size_t k = 0; k < s.horizon; ++k) {
      EXPECT_EQ(m.visits[k][0], 4 * (k + 1));
      EXPECT_NEAR(m.h_true[k], std::log(8.0 / (4.0 * static_cast<double>(k + 1))), 1e-12);
      if (k > 0) EXPECT_LT(m.h_true[k], m.h_true[k - 1]);
    }
    for (const auto& step : m.positions) EXPECT_EQ(step, std::vector<NodeIndex>(4, 0));
  }
}

TEST(RunTrial, UniformOnTwoNodesSplitsEvenly) {
  TrialSetup s{.graph = complete_graph(2), .truth = {{0, 0}, {1, 1}}};
  s.planner = PlannerKind::remc;
  s.n_robots = 200;
  s.horizon = 300;
  const TrialMetrics m = run_trial(s, Strategy::uniform, 5);
  EXPECT_NEAR(m.rho_hat.back()[0], 0.5, 0.02);
}

TEST(RunTrial, AnnealedStartsUniform) {
  const TrialMetrics m = run_trial(demo_setup(PlannerKind::metropolis_hastings, 3), Strategy::annealed, 1);
  EXPECT_EQ(m.rho_bar[0], uniform_target(7).vector());
}

TEST(RunTrial, SampleAccountingAndFrequencies) {
  const TrialSetup s = demo_setup(PlannerKind::metropolis_hastings, 60, 13);
  const TrialMetrics m = run_trial(s, Strategy::direct, 2);
  for (std::size_t k = 0; k < s.horizon; ++k) {
    const auto total = std::accumulate(m.visits[k].begin(), m.visits[k].end(), std::size_t{0});
    EXPECT_EQ(total, 13 * (k + 1));
    EXPECT_NEAR(std::accumulate(m.rho_hat[k].begin(), m.rho_hat[k].end(), 0.0), 1.0, 1e-12);
    EXPECT_NEAR(std::accumulate(m.rho_bar[k].begin(), m.rho_bar[k].end(), 0.0), 1.0, 1e-12);
    if (k > 0) {
      for (std::size_t i = 0; i < 7; ++i) EXPECT_GE(m.visits[k][i], m.visits[k - 1][i]);
    }
  }
}

TEST(RunTrial, Deterministic) {
  const TrialSetup s = demo_setup(PlannerKind::remc, 30);
  const TrialMetrics a = run_trial(s, Strategy::annealed, 42);
  const TrialMetrics b = run_trial(s, Strategy::annealed, 42);
  EXPECT_EQ(a.h_true, b.h_true);
  EXPECT_EQ(a.h_est, b.h_est);
  EXPECT_EQ(a.rho_bar, b.rho_bar);
  EXPECT_EQ(a.visits, b.visits);
  const TrialMetrics c = run_trial(s, Strategy::annealed, 43);
  EXPECT_NE(a.visits, c.visits);
}

TEST(RunTrial, MovesFollowEdgesAndTimeAverageMatchesVisits) {
  for (PlannerKind planner : {PlannerKind::remc, PlannerKind::fmmc, PlannerKind::metropolis_hastings}) {
    TrialSetup s = demo_setup(planner, 40, 10);
    s.record_positions = true;
    const TrialMetrics m = run_trial(s, Strategy::annealed, 11);
    ASSERT_EQ(m.positions.size(), s.horizon + 1);
    for (std::size_t k = 0; k + 1 < m.positions.size(); ++k) {
      for (std::size_t a = 0; a < s.n_robots; ++a)
        EXPECT_TRUE(s.graph.has_edge(m.positions[k][a], m.positions[k + 1][a]));
    }
    for (std::size_t k = 0; k < s.horizon; ++k) {
      const auto hat = time_average(std::span(m.positions).first(k + 1), 7);
      for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(hat[i], m.rho_hat[k][i], 1e-12);
    }
  }
}

TEST(RunTrial, InvalidSetupsRejected) {
  TrialSetup s = demo_setup(PlannerKind::remc, 5);
  s.n_robots = 0;
  EXPECT_THROW(run_trial(s, Strategy::uniform, 1), std::invalid_argument);
  s = demo_setup(PlannerKind::remc, 5);
  s.truth.variance.pop_back();
  s.truth.mean.pop_back();
  EXPECT_THROW(run_trial(s, Strategy::uniform, 1), std::invalid_argument);
  s = demo_setup(PlannerKind::remc, 5);
  s.schedule.alpha = 0.0;
  EXPECT_THROW(run_trial(s, Strategy::uniform, 1), std::invalid_argument);
}

TEST(AnnealedLimit, CoincidesWithDirectOnSameState) {
  std::mt19937_64 gen(6);
  const AnnealingSchedule schedule{};
  std::size_t k = 0;
  while (!(schedule.beta_at(k) > 1.0 - 1e-9)) ++k;
  for (int t = 0; t < 50; ++t) {
    NigState s = nig_init(7);
    std::normal_distribution<double> z(0.0, 4.0);
    for (int i = 0; i < 300; ++i) nig_update(s, gen() % 7, z(gen));
    const auto v = recover_variance(s);
    const auto a = gibbs_target(v, schedule.beta_at(k)), d = direct_target(v);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(a[i], d[i], 1e-9);
  }
}

TEST(Entropy, TrueMaxEntropyExamples) {
  const GroundTruth e{{0, 0}, {std::exp(1.0), std::exp(1.0)}};
  EXPECT_NEAR(true_max_entropy(e, std::vector<std::size_t>{1, 1}), 1.0, 1e-15);
  const GroundTruth t{{0, 0}, {4, 1}};
  EXPECT_NEAR(true_max_entropy(t, std::vector<std::size_t>{4, 1}), 0.0, 1e-15);
  const GroundTruth u{{0, 0, 0}, {3, 5, 7}};
  const std::vector<std::size_t> v{3, 2, 9}, twice{6, 4, 18};
  EXPECT_NEAR(true_max_entropy(u, v) - true_max_entropy(u, twice), std::log(2.0), 1e-12);
  // Zero visits are floored at one.
  EXPECT_NEAR(true_max_entropy(t, std::vector<std::size_t>{0, 0}), std::log(4.0), 1e-15);
}

TEST(Entropy, EstimatedMaxEntropy) {
  EXPECT_NEAR(estimated_max_entropy(nig_init(5)), std::log(4.0), 1e-15);
  NigState s = nig_init(3);
  const double before = estimated_max_entropy(s);
  s.b[1] *= 3.0;  // raises that region's recovered variance
  EXPECT_GE(estimated_max_entropy(s), before);
}

TEST(Entropy, EstimatedApproachesTrueWithManySamples) {
  const GroundTruth truth{{1, -1}, {5, 2}};
  Rng rng = make_stream(5, 1);
  NigState s = nig_init(2);
  std::vector<std::size_t> visits(2, 0);
  for (int i = 0; i < 40000; ++i) {
    const NodeIndex r = i % 2;
    nig_update(s, r, observe(truth, r, rng));
    ++visits[r];
  }
  EXPECT_NEAR(estimated_max_entropy(s), true_max_entropy(truth, visits), 0.05);
}

TEST(TimeAverage, Examples) {
  const std::vector<std::vector<NodeIndex>> delta(5, std::vector<NodeIndex>(3, 0));
  EXPECT_EQ(time_average(delta, 2).vector(), (std::vector<double>{1.0, 0.0}));
  const std::vector<std::vector<NodeIndex>> alt{{0}, {1}, {0}, {1}};
  EXPECT_EQ(time_average(alt, 2).vector(), (std::vector<double>{0.5, 0.5}));
  EXPECT_THROW(time_average(std::vector<std::vector<NodeIndex>>{}, 2), std::invalid_argument);
}

TrialMetrics constant_trial(double value, std::size_t horizon) {
  TrialMetrics m;
  m.h_true.assign(horizon, value);
  m.h_est.assign(horizon, value - 1.0);
  return m;
}

TEST(Aggregate, SingleTrial) {
  const std::vector<TrialMetrics> one{constant_trial(0.7, 4)};
  const QuartileSummary q = aggregate_trials(one);
  EXPECT_EQ(q.n_trials, 1u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(q.h_true.q1[k], 0.7);
    EXPECT_EQ(q.h_true.median[k], 0.7);
    EXPECT_EQ(q.h_true.q3[k], 0.7);
  }
}

TEST(Aggregate, ThreeConstantTrials) {
  const std::vector<TrialMetrics> three{constant_trial(1, 3), constant_trial(2, 3), constant_trial(3, 3)};
  const QuartileSummary q = aggregate_trials(three);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_DOUBLE_EQ(q.h_true.median[k], 2.0);
    EXPECT_DOUBLE_EQ(q.h_true.q1[k], 1.5);
    EXPECT_DOUBLE_EQ(q.h_true.q3[k], 2.5);
    EXPECT_DOUBLE_EQ(q.gap.median[k], 1.0);
  }
}

TEST(Aggregate, MismatchedHorizonsRejected) {
  const std::vector<TrialMetrics> bad{constant_trial(1, 3), constant_trial(2, 4)};
  EXPECT_THROW(aggregate_trials(bad), std::invalid_argument);
  EXPECT_THROW(aggregate_trials(std::vector<TrialMetrics>{}), std::invalid_argument);
}

TEST(AggregateProperty, OrderInvariant) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> d;
  for (int t = 0; t < 50; ++t) {
    std::vector<TrialMetrics> trials(1 + gen() % 9);
    for (auto& m : trials) {
      for (int k = 0; k < 5; ++k) {
        m.h_true.push_back(d(gen));
        m.h_est.push_back(d(gen));
      }
    }
    const QuartileSummary a = aggregate_trials(trials);
    std::shuffle(trials.begin(), trials.end(), gen);
    const QuartileSummary b = aggregate_trials(trials);
    EXPECT_EQ(a.h_true.q1, b.h_true.q1);
    EXPECT_EQ(a.h_true.median, b.h_true.median);
    EXPECT_EQ(a.h_est.q3, b.h_est.q3);
    EXPECT_EQ(a.gap.median, b.gap.median);
  }
}

TEST(Quantile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile({10}, 0.75), 10.0);
}

TEST(Strategy, NamesRoundTrip) {
  for (Strategy s : {Strategy::annealed, Strategy::direct, Strategy::uniform})
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_THROW(parse_strategy("greedy"), std::invalid_argument);
}

}  // namespace
}  // namespace aeig
