#include "chainflow/init.hpp"

#include <algorithm>
#include <optional>

#include "chainflow/flow.hpp"
#include "chainflow/layered.hpp"

namespace chainflow {

namespace {

// Per-arc derivative weights used to score candidate directions.
struct DerivWeights {
  std::vector<double> link;
  std::vector<double> node;
};

DerivWeights zero_load_weights(const Instance& inst) {
  DerivWeights w;
  for (const CostFn& c : inst.cost.link) w.link.push_back(c.derivative(0.0));
  for (const CostFn& c : inst.cost.node) w.node.push_back(c.derivative(0.0));
  return w;
}

// Derivatives at the previous attempt's loads, clamped strictly below
// capacity so the weights stay finite and heavily penalize hot spots.
DerivWeights loaded_weights(const Instance& inst, const FlowState& flows) {
  DerivWeights w;
  for (size_t e = 0; e < inst.cost.link.size(); ++e) {
    const CostFn& c = inst.cost.link[e];
    double x = flows.F[e];
    if (c.capacity() < kInf) x = std::min(x, 0.95 * c.capacity());
    w.link.push_back(c.derivative(x));
  }
  for (size_t i = 0; i < inst.cost.node.size(); ++i) {
    const CostFn& c = inst.cost.node[i];
    double x = flows.G[i];
    if (c.capacity() < kInf) x = std::min(x, 0.95 * c.capacity());
    w.node.push_back(c.derivative(x));
  }
  return w;
}

bool mask_cpu(const DirectionMask* m, AppId a, int k, NodeId i) {
  if (m == nullptr || m->empty()) return true;
  return m->rows[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)].cpu;
}

bool mask_out(const DirectionMask* m, AppId a, int k, NodeId i, int slot) {
  if (m == nullptr || m->empty()) return true;
  return m->rows[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)].out[static_cast<size_t>(slot)] != 0;
}

// Last resort for a row the label tree cannot reach: compute locally when
// possible, otherwise point at the lowest-id neighbor that keeps the stage
// subgraph (as built so far) acyclic.
void fallback_row(const Instance& inst, Strategy& phi, const DirectionMask* allowed, AppId a, int k, NodeId i) {
  const Application& app = inst.app(a);
  Row& r = phi.row(a, k, i);
  if (k < app.chain_len && app.can_compute(k, i) && mask_cpu(allowed, a, k, i)) {
    r.cpu = 1.0;
    return;
  }
  for (size_t s = 0; s < r.out.size(); ++s) {
    if (!mask_out(allowed, a, k, i, static_cast<int>(s))) continue;
    r.out[s] = 1.0;
    try {
      stage_topological_order(inst, phi, a, k);
      return;
    } catch (const LoopError&) {
      r.out[s] = 0.0;
    }
  }
  throw ValidationError("node " + std::to_string(i) + " has no usable direction at stage (" + std::to_string(a) +
                        "," + std::to_string(k) + "); it cannot take part in a feasible strategy");
}

// Builds one strategy from the layered labels: each row follows its label
// tree pointer, or, when `split` is set, spreads evenly over its best two
// label-decreasing directions. Label-decreasing rows can never form a cycle.
Strategy build_strategy(const Instance& inst, const DirectionMask* allowed, const DerivWeights& w, bool split) {
  Strategy phi(inst);
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    LinkWeightFn lw = [&](EdgeId e) { return w.link[static_cast<size_t>(e)]; };
    NodeWeightFn nw = [&](NodeId i) { return w.node[static_cast<size_t>(i)]; };
    EdgeFilterFn ef = [&](int k, EdgeId e) {
      const Edge& ed = inst.graph.edge(e);
      return mask_out(allowed, a, k, ed.from, inst.graph.out_slot(ed.from, ed.to));
    };
    CpuFilterFn cf = [&](int k, NodeId i) { return mask_cpu(allowed, a, k, i); };
    bool masked = allowed != nullptr && !allowed->empty();
    LayeredLabels lab = layered_shortest_to_dest(inst, a, lw, nw, masked ? &ef : nullptr, masked ? &cf : nullptr);

    for (int k = 0; k <= app.chain_len; ++k) {
      double L = app.packet_size[static_cast<size_t>(k)];
      for (NodeId i = 0; i < inst.graph.node_count(); ++i) {
        if (i == app.destination && k == app.chain_len) continue;
        Row& r = phi.row(a, k, i);
        if (!split) {
          int nx = lab.next[static_cast<size_t>(k)][static_cast<size_t>(i)];
          if (nx == LayeredLabels::kNextCpu) {
            r.cpu = 1.0;
          } else if (nx >= 0) {
            r.out[static_cast<size_t>(inst.graph.out_slot(i, inst.graph.edge(nx).to))] = 1.0;
          } else {
            fallback_row(inst, phi, allowed, a, k, i);
          }
          continue;
        }
        // score, tie-break hops, then slot (-1 = cpu) for determinism
        struct Cand {
          double score;
          int hops;
          int slot;
        };
        std::vector<Cand> cands;
        if (k < app.chain_len && app.can_compute(k, i) && mask_cpu(allowed, a, k, i) &&
            lab.reachable(k + 1, i)) {
          double nwt = w.node[static_cast<size_t>(i)];
          if (nwt < kInf)
            cands.push_back({app.weight(k, i) * nwt + lab.dist[static_cast<size_t>(k + 1)][static_cast<size_t>(i)],
                             1 + lab.hops[static_cast<size_t>(k + 1)][static_cast<size_t>(i)], -1});
        }
        const auto& nbr = inst.graph.out_neighbors(i);
        const auto& eids = inst.graph.out_edges(i);
        double di = lab.dist[static_cast<size_t>(k)][static_cast<size_t>(i)];
        int hi = lab.hops[static_cast<size_t>(k)][static_cast<size_t>(i)];
        for (size_t s = 0; s < nbr.size(); ++s) {
          if (!mask_out(allowed, a, k, i, static_cast<int>(s))) continue;
          NodeId j = nbr[s];
          double dj = lab.dist[static_cast<size_t>(k)][static_cast<size_t>(j)];
          int hj = lab.hops[static_cast<size_t>(k)][static_cast<size_t>(j)];
          if (dj == kInf) continue;
          if (!(dj < di || (dj == di && hj < hi))) continue;  // must descend
          double lwt = w.link[static_cast<size_t>(eids[s])];
          double arc = L == 0 ? 0.0 : L * lwt;
          cands.push_back({arc + dj, 1 + hj, static_cast<int>(s)});
        }
        if (cands.empty()) {
          fallback_row(inst, phi, allowed, a, k, i);
          continue;
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
          if (x.score != y.score) return x.score < y.score;
          if (x.hops != y.hops) return x.hops < y.hops;
          return x.slot < y.slot;
        });
        size_t take = std::min<size_t>(2, cands.size());
        double share = 1.0 / static_cast<double>(take);
        for (size_t c = 0; c < take; ++c) {
          if (cands[c].slot == -1)
            r.cpu = share;
          else
            r.out[static_cast<size_t>(cands[c].slot)] = share;
        }
      }
    }
  }
  return phi;
}

}  // namespace

Strategy zero_load_tree_strategy(const Instance& inst, const DirectionMask* allowed) {
  return build_strategy(inst, allowed, zero_load_weights(inst), false);
}

Strategy initial_strategy(const Instance& inst, const DirectionMask* allowed) {
  DerivWeights w = zero_load_weights(inst);
  FlowState last;
  auto attempt = [&](const DerivWeights& weights) -> std::optional<Strategy> {
    for (bool split : {false, true}) {
      Strategy phi = build_strategy(inst, allowed, weights, split);
      FlowState fl = solve_traffic(inst, phi);
      if (total_cost(inst, fl) < kInf) return phi;
      last = std::move(fl);
    }
    return std::nullopt;
  };
  if (auto phi = attempt(w)) return *phi;
  for (int round = 0; round < 8; ++round) {
    w = loaded_weights(inst, last);
    if (auto phi = attempt(w)) return *phi;
  }
  throw SaturationError("no finite-cost starting strategy found: demand appears to exceed capacity");
}

}  // namespace chainflow
