#include "aeig/graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace aeig {

RegionGraph::RegionGraph(std::size_t n_regions, std::vector<Edge> raw, bool self_loops)
    : n_regions_(n_regions), self_loops_(self_loops), out_(n_regions) {
  for (const Edge& e : raw) {
    if (e.from >= n_regions || e.to >= n_regions) {
      malformed_.push_back(e);
      continue;
    }
    if (e.from == e.to && !self_loops) continue;
    edges_.push_back(e);
  }
  if (self_loops) {
    for (NodeIndex i = 0; i < n_regions; ++i) edges_.push_back({i, i});
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const Edge& e : edges_) out_[e.from].push_back(e.to);
}

RegionGraph RegionGraph::from_undirected(std::size_t n_regions,
                                         const std::vector<std::pair<NodeIndex, NodeIndex>>& edges,
                                         bool self_loops) {
  std::vector<Edge> raw;
  raw.reserve(2 * edges.size());
  for (const auto& [a, b] : edges) {
    raw.push_back({a, b});
    raw.push_back({b, a});
  }
  return RegionGraph(n_regions, std::move(raw), self_loops);
}

RegionGraph RegionGraph::from_directed(std::size_t n_regions, const std::vector<Edge>& edges,
                                       bool self_loops) {
  return RegionGraph(n_regions, edges, self_loops);
}

bool RegionGraph::has_edge(NodeIndex from, NodeIndex to) const {
  if (from >= n_regions_) return false;
  const auto& adj = out_[from];
  return std::binary_search(adj.begin(), adj.end(), to);
}

const std::vector<NodeIndex>& RegionGraph::neighbors(NodeIndex j) const {
  if (j >= n_regions_) {
    throw std::out_of_range("region index " + std::to_string(j) + " out of range [0, " +
                            std::to_string(n_regions_) + ")");
  }
  return out_[j];
}

std::size_t RegionGraph::degree_without_self(NodeIndex j) const {
  const auto& adj = neighbors(j);
  return adj.size() - static_cast<std::size_t>(has_edge(j, j));
}

std::vector<bool> reachable_from(const RegionGraph& graph, NodeIndex source) {
  std::vector<bool> seen(graph.size(), false);
  if (source >= graph.size()) return seen;
  std::deque<NodeIndex> queue{source};
  seen[source] = true;
  while (!queue.empty()) {
    const NodeIndex j = queue.front();
    queue.pop_front();
    for (NodeIndex i : graph.neighbors(j)) {
      if (!seen[i]) {
        seen[i] = true;
        queue.push_back(i);
      }
    }
  }
  return seen;
}

GraphReport validate(const RegionGraph& graph) {
  GraphReport report;
  report.malformed_edges = graph.malformed_edges();
  for (const Edge& e : report.malformed_edges) {
    report.problems.push_back("edge (" + std::to_string(e.from) + ", " + std::to_string(e.to) +
                              ") has an index outside [0, " + std::to_string(graph.size()) + ")");
  }
  if (graph.size() == 0) {
    report.problems.emplace_back("graph has no regions");
    return report;
  }
  // Strongly connected iff every node reaches every other; n is small.
  report.strongly_connected = true;
  for (NodeIndex s = 0; s < graph.size() && report.strongly_connected; ++s) {
    const auto seen = reachable_from(graph, s);
    for (NodeIndex t = 0; t < graph.size(); ++t) {
      if (!seen[t]) {
        report.strongly_connected = false;
        report.problems.push_back("region " + std::to_string(t) + " is not reachable from region " +
                                  std::to_string(s));
        break;
      }
    }
  }
  return report;
}

RegionGraph demo_graph() {
  return RegionGraph::from_undirected(
      7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 0}, {1, 4}}, true);
}

RegionGraph path_graph(std::size_t n, bool self_loops) {
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  for (NodeIndex i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return RegionGraph::from_undirected(n, edges, self_loops);
}

RegionGraph complete_graph(std::size_t n, bool self_loops) {
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  for (NodeIndex i = 0; i < n; ++i) {
    for (NodeIndex j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return RegionGraph::from_undirected(n, edges, self_loops);
}

}  // namespace aeig
