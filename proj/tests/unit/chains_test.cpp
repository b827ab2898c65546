#include <gtest/gtest.h>

#include <algorithm>
#include <complex>
#include <random>
#include <sstream>

#include "aeig/chains.hpp"
#include "support/generators.hpp"

namespace aeig {
namespace {

TransitionMatrix make(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return TransitionMatrix(m);
}

void expect_detailed_balance(const TransitionMatrix& p, const TargetDistribution& rho, double tol) {
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      EXPECT_NEAR(rho[j] * p(i, j), rho[i] * p(j, i), tol) << i << "," << j;
}

TEST(MetropolisHastings, CompleteGraphUniform) {
  for (std::size_t n : {2u, 3u, 5u}) {
    const RegionGraph g = complete_graph(n);
    const TransitionMatrix p = metropolis_hastings(g, uniform_target(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        EXPECT_NEAR(p(i, j), i == j ? 0.0 : 1.0 / static_cast<double>(n - 1), 1e-15);
  }
  // Aperiodic once n >= 3, so the stationary distribution is defined.
  const auto rho = stationary_distribution(metropolis_hastings(complete_graph(4), uniform_target(4)));
  for (double r : rho.values()) EXPECT_NEAR(r, 0.25, 1e-9);
}

TEST(MetropolisHastings, TwoNodeHandComputation) {
  const TargetDistribution rho({1.0 / 3, 2.0 / 3});
  const TransitionMatrix p = metropolis_hastings(complete_graph(2), rho);
  EXPECT_NEAR(p(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(p(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(p(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(p(0, 0), 0.0, 1e-15);
  const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rho.vector().data(), 2);
  EXPECT_LT((p.matrix() * r - r).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MetropolisHastings, IsolatedNodeRejected) {
  const RegionGraph g = RegionGraph::from_undirected(3, {{0, 1}}, true);
  EXPECT_THROW(metropolis_hastings(g, uniform_target(3)), ChainError);
  const RegionGraph single = RegionGraph::from_undirected(1, {}, true);
  EXPECT_EQ(metropolis_hastings(single, uniform_target(1))(0, 0), 1.0);
}

TEST(MetropolisHastingsProperty, DetailedBalanceAndStationarity) {
  std::mt19937_64 gen(10);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + gen() % 11;
    const RegionGraph g = testgen::random_connected_graph(gen, n);
    const TargetDistribution rho = testgen::random_target(gen, n, 0.05, 1.0);
    const TransitionMatrix p = metropolis_hastings(g, rho);
    expect_detailed_balance(p, rho, 1e-12);
    const ChainDiagnostics d = validate_chain(p, g, rho);
    EXPECT_TRUE(d.feasible(1e-8));
    EXPECT_FALSE(d.slem_from_symmetrized);
    if (n > 2 || rho[0] != rho[1]) {
      EXPECT_TRUE(d.ergodic());
      const auto s = stationary_distribution(p);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(s[i], rho[i], 1e-9);
    }
  }
}

TEST(ValidateChain, IdentityIsStationaryButReducible) {
  const TransitionMatrix id(Eigen::MatrixXd::Identity(3, 3));
  const ChainDiagnostics d = validate_chain(id, complete_graph(3), uniform_target(3));
  EXPECT_EQ(d.stationarity_residual, 0.0);
  EXPECT_FALSE(d.irreducible);
  EXPECT_FALSE(d.ergodic());
}

TEST(ValidateChain, SupportViolationReported) {
  const TransitionMatrix p = make({{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}});
  // Path 0-1-2 has no edge between 0 and 2.
  const ChainDiagnostics d = validate_chain(p, path_graph(3), uniform_target(3));
  EXPECT_GT(d.support_violation, 0.0);
  EXPECT_FALSE(d.feasible());
}

TEST(ChainPeriod, Cases) {
  EXPECT_EQ(chain_period(make({{0, 1}, {1, 0}})), 2u);
  EXPECT_EQ(chain_period(make({{0.5, 0.5}, {0.5, 0.5}})), 1u);
  EXPECT_EQ(chain_period(make({{0, 0, 1}, {1, 0, 0}, {0, 1, 0}})), 3u);
  EXPECT_EQ(chain_period(make({{1, 0}, {0, 1}})), 0u);
}

TEST(StationaryDistribution, Cases) {
  const auto half = stationary_distribution(make({{0.5, 0.5}, {0.5, 0.5}}));
  EXPECT_NEAR(half[0], 0.5, 1e-12);
  EXPECT_NEAR(half[1], 0.5, 1e-12);
  EXPECT_THROW(stationary_distribution(make({{0, 1}, {1, 0}})), ChainError);
  EXPECT_THROW(stationary_distribution(make({{1, 0}, {0, 1}})), ChainError);
}

TEST(SampleNext, DeterministicColumn) {
  const TransitionMatrix p = make({{0, 0, 1}, {1, 0, 0}, {0, 1, 0}});
  Rng rng(4);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_next(p, 0, rng), 1u);
}

TEST(SampleNext, FairColumnFrequencies) {
  const TransitionMatrix p = make({{0.5, 0.5}, {0.5, 0.5}});
  Rng rng = make_stream(77, 1);
  constexpr int kDraws = 100000;
  int zeros = 0;
  for (int i = 0; i < kDraws; ++i) zeros += sample_next(p, 1, rng) == 0 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(zeros) / kDraws, 0.5, 0.01);
}

TEST(SampleNext, ReproducibleAndChecked) {
  const TransitionMatrix p = metropolis_hastings(demo_graph(), uniform_target(7));
  Rng a(9), b(9);
  NodeIndex ra = 0, rb = 0;
  for (int i = 0; i < 500; ++i) {
    ra = sample_next(p, ra, a);
    rb = sample_next(p, rb, b);
    EXPECT_EQ(ra, rb);
  }
  const TransitionMatrix bad = make({{0.5, 0.5}, {0.4, 0.5}});
  Rng r(1);
  EXPECT_THROW(sample_next(bad, 0, r), ChainError);
  EXPECT_THROW(sample_next(bad, 2, r), std::out_of_range);
}

TEST(TransitionMatrix, ClampsRoundoffNegatives) {
  const TransitionMatrix p = make({{1.0 + 5e-11, 0.5}, {-5e-11, 0.5}});
  EXPECT_EQ(p(1, 0), 0.0);
}

TEST(WriteMatrix, HeaderAndRows) {
  std::ostringstream os;
  write_matrix(os, make({{0.25, 1}, {0.75, 0}}));
  const std::string text = os.str();
  EXPECT_EQ(text.front(), '#');
  EXPECT_NE(text.find("column-stochastic"), std::string::npos);
  EXPECT_NE(text.find("0.25 1\n0.75 0\n"), std::string::npos);
}

// P~ = D^-1 P D is similar to P, so both spectra agree.
TEST(ChainProperty, SimilarityPreservesSpectrum) {
  std::mt19937_64 gen(12);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + gen() % 9;
    const RegionGraph g = testgen::random_connected_graph(gen, n);
    const TargetDistribution rho = testgen::random_target(gen, n);
    const ChainResult r = remc_solve(g, rho);
    const Eigen::MatrixXd& p = r.matrix.matrix();
    Eigen::VectorXd q(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) q(static_cast<Eigen::Index>(i)) = std::sqrt(rho[i]);
    const Eigen::MatrixXd pt = q.cwiseInverse().asDiagonal() * p * q.asDiagonal();
    auto spectrum = [](const Eigen::MatrixXd& m) {
      Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues();
      return std::vector<std::complex<double>>(ev.data(), ev.data() + ev.size());
    };
    const auto a = spectrum(p);
    auto b = spectrum(pt);
    // Greedy nearest matching; eigenvalue order is not canonical.
    for (const auto& x : a) {
      auto best = std::min_element(b.begin(), b.end(), [&](auto u, auto v) {
        return std::abs(u - x) < std::abs(v - x);
      });
      EXPECT_LT(std::abs(*best - x), 1e-8);
      b.erase(best);
    }
  }
}

TEST(PlannerKind, NamesRoundTrip) {
  for (PlannerKind k : {PlannerKind::remc, PlannerKind::fmmc, PlannerKind::metropolis_hastings})
    EXPECT_EQ(parse_planner_kind(to_string(k)), k);
  EXPECT_EQ(parse_planner_kind("mh"), PlannerKind::metropolis_hastings);
  EXPECT_THROW(parse_planner_kind("sdp"), std::invalid_argument);
}

}  // namespace
}  // namespace aeig
