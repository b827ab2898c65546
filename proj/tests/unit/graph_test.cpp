#include <gtest/gtest.h>

#include <random>
#include <set>

#include "aeig/graph.hpp"

namespace aeig {
namespace {

TEST(RegionGraph, SingletonWithSelfLoopIsValid) {
  const RegionGraph g = RegionGraph::from_undirected(1, {}, true);
  const GraphReport report = validate(g);
  EXPECT_TRUE(report.valid());
  EXPECT_TRUE(report.strongly_connected);
  EXPECT_EQ(g.neighbors(0), std::vector<NodeIndex>{0});
}

TEST(RegionGraph, OneWayEdgeIsNotStronglyConnected) {
  const RegionGraph g = RegionGraph::from_directed(2, {{0, 1}}, true);
  const GraphReport report = validate(g);
  EXPECT_FALSE(report.valid());
  EXPECT_FALSE(report.strongly_connected);
}

TEST(RegionGraph, DemoGraphIsValid) {
  const RegionGraph g = demo_graph();
  EXPECT_EQ(g.size(), 7u);
  EXPECT_TRUE(validate(g).valid());
  // Node 0 touches 1 and 6 on the ring, plus its self-loop.
  EXPECT_EQ(g.neighbors(0), (std::vector<NodeIndex>{0, 1, 6}));
  EXPECT_EQ(g.neighbors(1), (std::vector<NodeIndex>{0, 1, 2, 4}));
  EXPECT_EQ(g.edges().size(), 7u + 2u * 8u);
}

TEST(RegionGraph, PathNeighborsIncludeSelf) {
  const RegionGraph g = path_graph(3);
  EXPECT_EQ(g.neighbors(1), (std::vector<NodeIndex>{0, 1, 2}));
  EXPECT_EQ(g.degree_without_self(1), 2u);
  EXPECT_EQ(g.degree_without_self(0), 1u);
}

TEST(RegionGraph, NeighborsRejectsOutOfRange) {
  EXPECT_THROW(demo_graph().neighbors(7), std::out_of_range);
}

TEST(RegionGraph, MalformedEdgesAreReported) {
  const RegionGraph g = RegionGraph::from_undirected(3, {{0, 1}, {1, 2}, {2, 5}}, true);
  const GraphReport report = validate(g);
  EXPECT_FALSE(report.valid());
  ASSERT_EQ(report.malformed_edges.size(), 2u);  // both directions of (2, 5)
  EXPECT_TRUE(report.strongly_connected);
}

TEST(RegionGraph, SelfLoopsOffDropsDiagonal) {
  const RegionGraph g = path_graph(3, false);
  EXPECT_FALSE(g.has_edge(1, 1));
  EXPECT_EQ(g.neighbors(1), (std::vector<NodeIndex>{0, 2}));
  EXPECT_TRUE(validate(g).valid());
}

// Random undirected graphs: neighbors() is exactly the out-set of the edge
// list, and validation agrees with brute-force reachability.
TEST(RegionGraphProperty, NeighborsMatchEdgesAndConnectivityMatchesClosure) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 9;
    std::vector<std::pair<NodeIndex, NodeIndex>> und;
    for (NodeIndex a = 0; a < n; ++a) {
      for (NodeIndex b = a + 1; b < n; ++b) {
        if (rng() % 3 == 0) und.emplace_back(a, b);
      }
    }
    const RegionGraph g = RegionGraph::from_undirected(n, und, true);
    for (NodeIndex j = 0; j < n; ++j) {
      std::set<NodeIndex> expected{j};
      for (const auto& [a, b] : und) {
        if (a == j) expected.insert(b);
        if (b == j) expected.insert(a);
      }
      EXPECT_EQ(g.neighbors(j), std::vector<NodeIndex>(expected.begin(), expected.end()));
    }
    // Floyd-Warshall style closure as the reference.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (const Edge& e : g.edges()) reach[e.from][e.to] = true;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    bool all = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) all = all && reach[i][j];
    EXPECT_EQ(validate(g).strongly_connected, all);
  }
}

}  // namespace
}  // namespace aeig
