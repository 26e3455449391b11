#include "chainflow/graph.hpp"

#include <algorithm>
#include <sstream>

namespace chainflow {

NetworkGraph::NetworkGraph(int node_count, std::vector<std::pair<NodeId, NodeId>> edges)
    : node_count_(node_count) {
  if (node_count < 0) throw ValidationError("node count must be nonnegative");
  edges_.reserve(edges.size());
  for (auto [i, j] : edges) {
    if (i < 0 || i >= node_count || j < 0 || j >= node_count)
      throw ValidationError("edge endpoint out of range: (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (i == j) throw ValidationError("self-loop edge at node " + std::to_string(i));
    edges_.push_back({i, j});
  }
  rebuild_adjacency();
  for (NodeId i = 0; i < node_count_; ++i) {
    const auto& nbr = out_nbr_[static_cast<size_t>(i)];
    if (std::adjacent_find(nbr.begin(), nbr.end()) != nbr.end())
      throw ValidationError("duplicate edge out of node " + std::to_string(i));
  }
}

void NetworkGraph::rebuild_adjacency() {
  out_nbr_.assign(static_cast<size_t>(node_count_), {});
  out_eid_.assign(static_cast<size_t>(node_count_), {});
  in_eid_.assign(static_cast<size_t>(node_count_), {});
  // Sort edge ids per tail by head id for stable slot order.
  std::vector<std::vector<EdgeId>> by_tail(static_cast<size_t>(node_count_));
  for (EdgeId e = 0; e < edge_count(); ++e) by_tail[static_cast<size_t>(edges_[static_cast<size_t>(e)].from)].push_back(e);
  for (NodeId i = 0; i < node_count_; ++i) {
    auto& ids = by_tail[static_cast<size_t>(i)];
    std::sort(ids.begin(), ids.end(),
              [&](EdgeId a, EdgeId b) { return edges_[static_cast<size_t>(a)].to < edges_[static_cast<size_t>(b)].to; });
    for (EdgeId e : ids) {
      out_nbr_[static_cast<size_t>(i)].push_back(edges_[static_cast<size_t>(e)].to);
      out_eid_[static_cast<size_t>(i)].push_back(e);
      in_eid_[static_cast<size_t>(edges_[static_cast<size_t>(e)].to)].push_back(e);
    }
  }
}

EdgeId NetworkGraph::edge_between(NodeId i, NodeId j) const {
  if (i < 0 || i >= node_count_) return -1;
  const auto& nbr = out_nbr_[static_cast<size_t>(i)];
  auto it = std::lower_bound(nbr.begin(), nbr.end(), j);
  if (it == nbr.end() || *it != j) return -1;
  return out_eid_[static_cast<size_t>(i)][static_cast<size_t>(it - nbr.begin())];
}

int NetworkGraph::out_slot(NodeId i, NodeId j) const {
  const auto& nbr = out_nbr_[static_cast<size_t>(i)];
  auto it = std::lower_bound(nbr.begin(), nbr.end(), j);
  if (it == nbr.end() || *it != j) return -1;
  return static_cast<int>(it - nbr.begin());
}

EdgeId NetworkGraph::add_edge(NodeId i, NodeId j) {
  if (i < 0 || i >= node_count_ || j < 0 || j >= node_count_ || i == j)
    throw ValidationError("invalid edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
  if (has_edge(i, j)) throw ValidationError("edge already exists");
  edges_.push_back({i, j});
  rebuild_adjacency();
  return edge_count() - 1;
}

void NetworkGraph::remove_edge(NodeId i, NodeId j) {
  EdgeId e = edge_between(i, j);
  if (e < 0) throw ValidationError("edge (" + std::to_string(i) + "," + std::to_string(j) + ") does not exist");
  edges_.erase(edges_.begin() + e);
  rebuild_adjacency();
}

NodeId NetworkGraph::add_node() {
  ++node_count_;
  out_nbr_.emplace_back();
  out_eid_.emplace_back();
  in_eid_.emplace_back();
  return node_count_ - 1;
}

std::string NetworkGraph::to_dot() const {
  std::ostringstream os;
  os << "digraph network {\n";
  for (NodeId i = 0; i < node_count_; ++i) os << "  n" << i << " [label=\"" << i << "\"];\n";
  for (const Edge& e : edges_) os << "  n" << e.from << " -> n" << e.to << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace chainflow
