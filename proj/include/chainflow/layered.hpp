#pragma once

#include <functional>
#include <vector>

#include "chainflow/instance.hpp"

namespace chainflow {

// Shortest paths to (destination, final stage) in an application's layered
// graph: layer k holds a copy of every node; intra-layer arcs are the graph
// edges weighted packet_size[k] * link_weight(e); the arc (i,k) -> (i,k+1)
// is the CPU transition weighted comp_weight[k][i] * node_weight(i).
//
// Ties break lexicographically by (cost, hops, neighbor id), making the
// resulting in-tree deterministic. next encodes the chosen direction:
// kNextNone (unreachable or the terminal), kNextCpu, or the edge id.
struct LayeredLabels {
  static constexpr int kNextNone = -2;
  static constexpr int kNextCpu = -1;
  std::vector<std::vector<double>> dist;  // [k][i] cost-to-go
  std::vector<std::vector<int>> hops;     // [k][i] arc count of chosen path
  std::vector<std::vector<int>> next;     // [k][i]

  bool reachable(int k, NodeId i) const { return dist[static_cast<size_t>(k)][static_cast<size_t>(i)] < kInf; }
};

using LinkWeightFn = std::function<double(EdgeId)>;
using NodeWeightFn = std::function<double(NodeId)>;
// Arc filters receive the stage index so restrictions can vary per layer.
using EdgeFilterFn = std::function<bool(int k, EdgeId e)>;
using CpuFilterFn = std::function<bool(int k, NodeId i)>;

// allowed_edge / allowed_cpu: optional arc filters (nullptr allows all).
LayeredLabels layered_shortest_to_dest(const Instance& inst, AppId a, const LinkWeightFn& link_weight,
                                       const NodeWeightFn& node_weight, const EdgeFilterFn* allowed_edge = nullptr,
                                       const CpuFilterFn* allowed_cpu = nullptr);

// Plain single-layer variant: cost-to-go of every node to `dest` under the
// given edge weights, with the same deterministic tie-breaking.
struct TreeLabels {
  std::vector<double> dist;
  std::vector<int> hops;
  std::vector<EdgeId> next_edge;  // -1 at dest / unreachable
};
TreeLabels shortest_to_dest(const NetworkGraph& graph, NodeId dest, const LinkWeightFn& edge_weight);

}  // namespace chainflow
