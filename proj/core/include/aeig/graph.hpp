#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace aeig {

using NodeIndex = std::size_t;

// Directed edge: a robot in region `from` may move to region `to`.
struct Edge {
  NodeIndex from = 0;
  NodeIndex to = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Region graph G = (R, E). Edges are stored directed; undirected input is
/// expanded to both directions. Immutable after construction.
///
/// Construction never throws on bad edge indices: they are kept aside and
/// surfaced by validate(), so a config can be diagnosed in one pass.
class RegionGraph {
 public:
  RegionGraph() = default;

  static RegionGraph from_undirected(std::size_t n_regions,
                                     const std::vector<std::pair<NodeIndex, NodeIndex>>& edges,
                                     bool self_loops = true);
  static RegionGraph from_directed(std::size_t n_regions, const std::vector<Edge>& edges,
                                   bool self_loops = true);

  std::size_t size() const { return n_regions_; }
  bool self_loops_allowed() const { return self_loops_; }

  // Sorted, deduplicated, in-range directed edges (self-loops included when on).
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Edge>& malformed_edges() const { return malformed_; }

  bool has_edge(NodeIndex from, NodeIndex to) const;

  // All i with (j, i) in E, ascending. Throws std::out_of_range for bad j.
  const std::vector<NodeIndex>& neighbors(NodeIndex j) const;

  // Out-degree of j not counting its self-loop.
  std::size_t degree_without_self(NodeIndex j) const;

 private:
  RegionGraph(std::size_t n_regions, std::vector<Edge> raw, bool self_loops);

  std::size_t n_regions_ = 0;
  bool self_loops_ = true;
  std::vector<Edge> edges_;
  std::vector<Edge> malformed_;
  std::vector<std::vector<NodeIndex>> out_;
};

struct GraphReport {
  bool strongly_connected = false;
  std::vector<Edge> malformed_edges;
  std::vector<std::string> problems;

  bool valid() const { return strongly_connected && malformed_edges.empty() && problems.empty(); }
  explicit operator bool() const { return valid(); }
};

GraphReport validate(const RegionGraph& graph);

// Nodes reachable from `source` following directed edges.
std::vector<bool> reachable_from(const RegionGraph& graph, NodeIndex source);

// Ring 0-1-...-6-0 plus the chord 1-4, undirected, with self-loops.
RegionGraph demo_graph();
RegionGraph path_graph(std::size_t n, bool self_loops = true);
RegionGraph complete_graph(std::size_t n, bool self_loops = true);

}  // namespace aeig
