#include "chainflow/layered.hpp"

#include <queue>
#include <tuple>

namespace chainflow {

namespace {

// Lexicographic label: (cost, hops). Smaller is better; the hop component
// makes trees deterministic even across zero-weight arcs.
struct Label {
  double dist;
  int hops;
  bool better_than(double d, int h) const { return dist < d || (dist == d && hops < h); }
};

// One backward Dijkstra pass over a single layer: labels start from `dist`
// already holding the layer's seed values (terminal node or CPU arcs into
// the next layer), then relax the graph edges against the direction of
// traffic. Strict lexicographic improvement only, so ties keep the label of
// the node popped first (smallest id among equals).
void relax_layer(const NetworkGraph& graph, const std::vector<double>& edge_cost, std::vector<double>& dist,
                 std::vector<int>& hops, std::vector<int>& next) {
  using QItem = std::tuple<double, int, NodeId>;
  std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;
  int n = graph.node_count();
  for (NodeId i = 0; i < n; ++i)
    if (dist[static_cast<size_t>(i)] < kInf) pq.emplace(dist[static_cast<size_t>(i)], hops[static_cast<size_t>(i)], i);
  std::vector<char> done(static_cast<size_t>(n), 0);
  while (!pq.empty()) {
    auto [d, h, j] = pq.top();
    pq.pop();
    if (done[static_cast<size_t>(j)] || d > dist[static_cast<size_t>(j)] ||
        (d == dist[static_cast<size_t>(j)] && h > hops[static_cast<size_t>(j)]))
      continue;
    done[static_cast<size_t>(j)] = 1;
    for (EdgeId e : graph.in_edges(j)) {
      double c = edge_cost[static_cast<size_t>(e)];
      if (c == kInf) continue;
      NodeId i = graph.edge(e).from;
      if (done[static_cast<size_t>(i)]) continue;
      double nd = d + c;
      int nh = h + 1;
      if (Label{nd, nh}.better_than(dist[static_cast<size_t>(i)], hops[static_cast<size_t>(i)])) {
        dist[static_cast<size_t>(i)] = nd;
        hops[static_cast<size_t>(i)] = nh;
        next[static_cast<size_t>(i)] = e;
        pq.emplace(nd, nh, i);
      }
    }
  }
}

}  // namespace

LayeredLabels layered_shortest_to_dest(const Instance& inst, AppId a, const LinkWeightFn& link_weight,
                                       const NodeWeightFn& node_weight, const EdgeFilterFn* allowed_edge,
                                       const CpuFilterFn* allowed_cpu) {
  const Application& app = inst.app(a);
  const NetworkGraph& graph = inst.graph;
  int n = graph.node_count();
  int K = app.chain_len;
  LayeredLabels lab;
  lab.dist.assign(static_cast<size_t>(K + 1), std::vector<double>(static_cast<size_t>(n), kInf));
  lab.hops.assign(static_cast<size_t>(K + 1), std::vector<int>(static_cast<size_t>(n), 0));
  lab.next.assign(static_cast<size_t>(K + 1), std::vector<int>(static_cast<size_t>(n), LayeredLabels::kNextNone));

  std::vector<double> edge_cost(static_cast<size_t>(graph.edge_count()));
  for (int k = K; k >= 0; --k) {
    double L = app.packet_size[static_cast<size_t>(k)];
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      bool ok = allowed_edge == nullptr || (*allowed_edge)(k, e);
      double w = ok ? link_weight(e) : kInf;
      edge_cost[static_cast<size_t>(e)] = (L == 0 || w == kInf) ? (w == kInf ? kInf : 0.0) : L * w;
    }
    auto& dist = lab.dist[static_cast<size_t>(k)];
    auto& hops = lab.hops[static_cast<size_t>(k)];
    auto& next = lab.next[static_cast<size_t>(k)];
    if (k == K) {
      dist[static_cast<size_t>(app.destination)] = 0.0;
    } else {
      for (NodeId i = 0; i < n; ++i) {
        double w = app.weight(k, i);
        if (w == kInf) continue;
        if (allowed_cpu != nullptr && !(*allowed_cpu)(k, i)) continue;
        double down = lab.dist[static_cast<size_t>(k + 1)][static_cast<size_t>(i)];
        if (down == kInf) continue;
        double nw = node_weight(i);
        if (nw == kInf) continue;
        dist[static_cast<size_t>(i)] = w * nw + down;
        hops[static_cast<size_t>(i)] = lab.hops[static_cast<size_t>(k + 1)][static_cast<size_t>(i)] + 1;
        next[static_cast<size_t>(i)] = LayeredLabels::kNextCpu;
      }
    }
    relax_layer(graph, edge_cost, dist, hops, next);
  }
  return lab;
}

TreeLabels shortest_to_dest(const NetworkGraph& graph, NodeId dest, const LinkWeightFn& edge_weight) {
  int n = graph.node_count();
  TreeLabels lab;
  lab.dist.assign(static_cast<size_t>(n), kInf);
  lab.hops.assign(static_cast<size_t>(n), 0);
  lab.next_edge.assign(static_cast<size_t>(n), -1);
  std::vector<double> edge_cost(static_cast<size_t>(graph.edge_count()));
  for (EdgeId e = 0; e < graph.edge_count(); ++e) edge_cost[static_cast<size_t>(e)] = edge_weight(e);
  lab.dist[static_cast<size_t>(dest)] = 0.0;
  relax_layer(graph, edge_cost, lab.dist, lab.hops, lab.next_edge);
  return lab;
}

}  // namespace chainflow
