#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chainflow/types.hpp"

namespace chainflow {

struct Edge {
  NodeId from = -1;
  NodeId to = -1;
};

// Directed multigraph-free graph. Out-neighbor lists are kept sorted by node
// id so that per-row direction slots have a stable, deterministic order.
class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(int node_count, std::vector<std::pair<NodeId, NodeId>> edges);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<size_t>(e)]; }

  const std::vector<NodeId>& out_neighbors(NodeId i) const { return out_nbr_[static_cast<size_t>(i)]; }
  const std::vector<EdgeId>& out_edges(NodeId i) const { return out_eid_[static_cast<size_t>(i)]; }
  const std::vector<EdgeId>& in_edges(NodeId i) const { return in_eid_[static_cast<size_t>(i)]; }

  // -1 when (i, j) is not an edge.
  EdgeId edge_between(NodeId i, NodeId j) const;
  bool has_edge(NodeId i, NodeId j) const { return edge_between(i, j) >= 0; }

  // Slot of neighbor j within out_neighbors(i), -1 if absent.
  int out_slot(NodeId i, NodeId j) const;

  // Mutation support for runtime events. Edge ids are reassigned on removal;
  // callers keep strategies aligned by neighbor id, not by slot.
  EdgeId add_edge(NodeId i, NodeId j);
  void remove_edge(NodeId i, NodeId j);
  NodeId add_node();

  std::string to_dot() const;

 private:
  void rebuild_adjacency();

  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> out_nbr_;
  std::vector<std::vector<EdgeId>> out_eid_;  // aligned with out_nbr_
  std::vector<std::vector<EdgeId>> in_eid_;
};

}  // namespace chainflow
