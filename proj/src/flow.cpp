#include "chainflow/flow.hpp"

#include <algorithm>
#include <json.hpp>
#include <queue>

namespace chainflow {

using json = nlohmann::json;

namespace {

// Expected row sum under the feasibility constraint: the destination's
// final-stage row is all zeros, every other row is a full split.
double expected_row_sum(const Application& app, int k, NodeId i) {
  return (k == app.chain_len && i == app.destination) ? 0.0 : 1.0;
}

// Nodes of one cycle inside the positive-fraction stage subgraph, for error
// reporting. `alive` marks nodes not removed by the topological peel.
std::vector<NodeId> extract_cycle(const Instance& inst, const Strategy& phi, AppId a, int k,
                                  const std::vector<char>& alive) {
  int n = inst.graph.node_count();
  NodeId start = -1;
  for (NodeId i = 0; i < n; ++i)
    if (alive[static_cast<size_t>(i)]) {
      start = i;
      break;
    }
  if (start < 0) return {};
  std::vector<int> seen(static_cast<size_t>(n), -1);
  std::vector<NodeId> path;
  NodeId cur = start;
  while (seen[static_cast<size_t>(cur)] < 0) {
    seen[static_cast<size_t>(cur)] = static_cast<int>(path.size());
    path.push_back(cur);
    const auto& nbr = inst.graph.out_neighbors(cur);
    const Row& r = phi.row(a, k, cur);
    NodeId nxt = -1;
    for (size_t s = 0; s < nbr.size(); ++s)
      if (r.out[s] > kEpsPhi && alive[static_cast<size_t>(nbr[s])]) {
        nxt = nbr[s];
        break;
      }
    if (nxt < 0) return {};  // should not happen: alive nodes keep alive successors
    cur = nxt;
  }
  return {path.begin() + seen[static_cast<size_t>(cur)], path.end()};
}

}  // namespace

std::vector<NodeId> stage_topological_order(const Instance& inst, const Strategy& phi, AppId a, int k) {
  int n = inst.graph.node_count();
  std::vector<int> indeg(static_cast<size_t>(n), 0);
  for (NodeId i = 0; i < n; ++i) {
    const Row& r = phi.row(a, k, i);
    const auto& nbr = inst.graph.out_neighbors(i);
    for (size_t s = 0; s < nbr.size(); ++s)
      if (r.out[s] > kEpsPhi) ++indeg[static_cast<size_t>(nbr[s])];
  }
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId i = 0; i < n; ++i)
    if (indeg[static_cast<size_t>(i)] == 0) ready.push(i);
  std::vector<NodeId> order;
  order.reserve(static_cast<size_t>(n));
  while (!ready.empty()) {
    NodeId i = ready.top();
    ready.pop();
    order.push_back(i);
    const Row& r = phi.row(a, k, i);
    const auto& nbr = inst.graph.out_neighbors(i);
    for (size_t s = 0; s < nbr.size(); ++s)
      if (r.out[s] > kEpsPhi && --indeg[static_cast<size_t>(nbr[s])] == 0) ready.push(nbr[s]);
  }
  if (static_cast<int>(order.size()) != n) {
    std::vector<char> alive(static_cast<size_t>(n), 0);
    for (NodeId i = 0; i < n; ++i) alive[static_cast<size_t>(i)] = 1;
    for (NodeId i : order) alive[static_cast<size_t>(i)] = 0;
    auto cycle = extract_cycle(inst, phi, a, k, alive);
    throw LoopError(a, k, cycle,
                    "stage (" + std::to_string(a) + "," + std::to_string(k) + ") routing contains a cycle");
  }
  return order;
}

ValidationReport validate_strategy(const Instance& inst, const Strategy& phi) {
  ValidationReport report;
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    for (int k = 0; k <= app.chain_len; ++k) {
      for (NodeId i = 0; i < inst.graph.node_count(); ++i) {
        const Row& r = phi.row(a, k, i);
        double sum = r.sum();
        double expected = expected_row_sum(app, k, i);
        bool negative = r.cpu < -kEpsRowSum ||
                        std::any_of(r.out.begin(), r.out.end(), [](double v) { return v < -kEpsRowSum; });
        if (std::abs(sum - expected) > kEpsRowSum || negative)
          report.simplex.push_back({a, k, i, sum, expected});
        if (k == app.chain_len) {
          if (r.cpu > kEpsRowSum) report.cpu.push_back({a, k, i, r.cpu, "final-stage"});
        } else if (r.cpu > kEpsPhi && !app.can_compute(k, i)) {
          report.cpu.push_back({a, k, i, r.cpu, "incapable"});
        }
      }
      try {
        stage_topological_order(inst, phi, a, k);
      } catch (const LoopError& e) {
        report.loops.push_back({a, k, e.cycle});
      }
    }
  }
  return report;
}

std::string ValidationReport::to_json_string(int indent) const {
  json j;
  j["ok"] = ok();
  json js = json::array();
  for (const auto& v : simplex)
    js.push_back({{"app", v.app}, {"k", v.k}, {"node", v.node}, {"row_sum", v.row_sum}, {"expected", v.expected}});
  j["simplex_violations"] = js;
  json jl = json::array();
  for (const auto& v : loops) jl.push_back({{"app", v.app}, {"k", v.k}, {"cycle", v.cycle}});
  j["loops"] = jl;
  json jc = json::array();
  for (const auto& v : cpu)
    jc.push_back({{"app", v.app}, {"k", v.k}, {"node", v.node}, {"fraction", v.fraction}, {"reason", v.reason}});
  j["cpu_violations"] = jc;
  return j.dump(indent);
}

FlowState solve_traffic(const Instance& inst, const Strategy& phi) {
  FlowState fs;
  int n = inst.graph.node_count();
  int m = inst.graph.edge_count();
  fs.t.resize(inst.apps.size());
  fs.g.resize(inst.apps.size());
  fs.f.resize(inst.apps.size());
  fs.F.assign(static_cast<size_t>(m), 0.0);
  fs.G.assign(static_cast<size_t>(n), 0.0);
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    auto& ta = fs.t[static_cast<size_t>(a)];
    auto& ga = fs.g[static_cast<size_t>(a)];
    auto& fa = fs.f[static_cast<size_t>(a)];
    ta.assign(static_cast<size_t>(app.stage_count()), std::vector<double>(static_cast<size_t>(n), 0.0));
    ga.assign(static_cast<size_t>(app.stage_count()), std::vector<double>(static_cast<size_t>(n), 0.0));
    fa.assign(static_cast<size_t>(app.stage_count()), std::vector<double>(static_cast<size_t>(m), 0.0));
    for (int k = 0; k <= app.chain_len; ++k) {
      auto order = stage_topological_order(inst, phi, a, k);
      auto& t = ta[static_cast<size_t>(k)];
      // Injection: exogenous input at stage 0, the previous stage's CPU
      // output afterwards (one packet out per packet computed).
      for (NodeId i = 0; i < n; ++i)
        t[static_cast<size_t>(i)] = (k == 0) ? app.rate(i) : ga[static_cast<size_t>(k - 1)][static_cast<size_t>(i)];
      for (NodeId i : order) {
        double ti = t[static_cast<size_t>(i)];
        const Row& r = phi.row(a, k, i);
        if (ti <= 0) continue;
        if (r.cpu > kEpsPhi) ga[static_cast<size_t>(k)][static_cast<size_t>(i)] = ti * r.cpu;
        const auto& nbr = inst.graph.out_neighbors(i);
        const auto& eids = inst.graph.out_edges(i);
        for (size_t s = 0; s < nbr.size(); ++s) {
          if (r.out[s] > kEpsPhi) {
            double flow = ti * r.out[s];
            fa[static_cast<size_t>(k)][static_cast<size_t>(eids[s])] = flow;
            t[static_cast<size_t>(nbr[s])] += flow;
          }
        }
      }
      double L = app.packet_size[static_cast<size_t>(k)];
      if (L > 0)
        for (EdgeId e = 0; e < m; ++e) fs.F[static_cast<size_t>(e)] += L * fa[static_cast<size_t>(k)][static_cast<size_t>(e)];
      if (k < app.chain_len)
        for (NodeId i = 0; i < n; ++i) {
          double gi = ga[static_cast<size_t>(k)][static_cast<size_t>(i)];
          if (gi > 0) fs.G[static_cast<size_t>(i)] += app.weight(k, i) * gi;
        }
    }
  }
  return fs;
}

double total_cost(const Instance& inst, const FlowState& flows) {
  double total = 0;
  for (EdgeId e = 0; e < inst.graph.edge_count(); ++e) {
    double c = inst.cost.link[static_cast<size_t>(e)].evaluate(flows.F[static_cast<size_t>(e)]);
    if (c == kInf) return kInf;
    total += c;
  }
  for (NodeId i = 0; i < inst.graph.node_count(); ++i) {
    double c = inst.cost.node[static_cast<size_t>(i)].evaluate(flows.G[static_cast<size_t>(i)]);
    if (c == kInf) return kInf;
    total += c;
  }
  return total;
}

double total_cost(const Instance& inst, const Strategy& phi) { return total_cost(inst, solve_traffic(inst, phi)); }

}  // namespace chainflow
