#include "chainflow/marginal.hpp"

#include <algorithm>
#include <sstream>

namespace chainflow {

namespace {

// Derivative of a link's cost with respect to one stage's packet rate on it:
// packet size times D'. Zero-size packets add no load, so their derivative
// is zero even on a saturated link.
double link_term(double packet_size, double deriv) {
  if (packet_size == 0) return 0.0;
  return packet_size * deriv;  // deriv may be +inf
}

void shape_like_strategy(const Instance& inst, MarginalState& m) {
  m.dD_dt.resize(inst.apps.size());
  m.delta.resize(inst.apps.size());
  m.dD_dphi.resize(inst.apps.size());
  for (size_t a = 0; a < inst.apps.size(); ++a) {
    int stages = inst.apps[a].stage_count();
    int n = inst.graph.node_count();
    m.dD_dt[a].assign(static_cast<size_t>(stages), std::vector<double>(static_cast<size_t>(n), 0.0));
    m.delta[a].assign(static_cast<size_t>(stages), std::vector<Row>(static_cast<size_t>(n)));
    m.dD_dphi[a].assign(static_cast<size_t>(stages), std::vector<Row>(static_cast<size_t>(n)));
    for (int k = 0; k < stages; ++k)
      for (NodeId i = 0; i < n; ++i) {
        m.delta[a][static_cast<size_t>(k)][static_cast<size_t>(i)].out.assign(inst.graph.out_neighbors(i).size(), 0.0);
        m.dD_dphi[a][static_cast<size_t>(k)][static_cast<size_t>(i)].out.assign(inst.graph.out_neighbors(i).size(), 0.0);
      }
  }
}

// dD_dt value of one node from its stage-k row, given finished downstream
// values in `dt_k` and the next stage's values in `dt_k1` (null at the final
// stage). Summation order fixed (out slots, then CPU) so the centralized and
// message-passing paths produce bit-identical numbers.
double node_value(const Instance& inst, const Strategy& phi, const FlowState& flows, AppId a, int k, NodeId i,
                  const std::vector<double>& dt_k, const std::vector<double>* dt_k1) {
  const Application& app = inst.app(a);
  const Row& r = phi.row(a, k, i);
  const auto& nbr = inst.graph.out_neighbors(i);
  const auto& eids = inst.graph.out_edges(i);
  double L = app.packet_size[static_cast<size_t>(k)];
  double acc = 0.0;
  for (size_t s = 0; s < nbr.size(); ++s) {
    if (r.out[s] <= kEpsPhi) continue;
    EdgeId e = eids[s];
    double deriv = inst.cost.link[static_cast<size_t>(e)].derivative(flows.F[static_cast<size_t>(e)]);
    double term = link_term(L, deriv) + dt_k[static_cast<size_t>(nbr[s])];
    if (term == kInf) return kInf;
    acc += r.out[s] * term;
  }
  if (k < app.chain_len && r.cpu > kEpsPhi) {
    double w = app.weight(k, i);
    double term;
    if (w == kInf) {
      term = kInf;
    } else {
      double cderiv = inst.cost.node[static_cast<size_t>(i)].derivative(flows.G[static_cast<size_t>(i)]);
      term = (cderiv == kInf) ? kInf : w * cderiv + (*dt_k1)[static_cast<size_t>(i)];
    }
    if (term == kInf) return kInf;
    acc += r.cpu * term;
  }
  return acc;
}

// Fills delta and dD_dphi for one stage once dD_dt is complete.
void fill_direction_marginals(const Instance& inst, const FlowState& flows, AppId a, int k, MarginalState& m) {
  const Application& app = inst.app(a);
  int n = inst.graph.node_count();
  double L = app.packet_size[static_cast<size_t>(k)];
  const auto& dt_k = m.dD_dt[static_cast<size_t>(a)][static_cast<size_t>(k)];
  for (NodeId i = 0; i < n; ++i) {
    Row& d = m.delta[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)];
    Row& dp = m.dD_dphi[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)];
    double ti = flows.t[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)];
    if (k == app.chain_len) {
      d.cpu = kInf;  // no further task to run
    } else {
      double w = app.weight(k, i);
      if (w == kInf) {
        d.cpu = kInf;
      } else {
        double cderiv = inst.cost.node[static_cast<size_t>(i)].derivative(flows.G[static_cast<size_t>(i)]);
        d.cpu = (cderiv == kInf)
                    ? kInf
                    : w * cderiv + m.dD_dt[static_cast<size_t>(a)][static_cast<size_t>(k + 1)][static_cast<size_t>(i)];
      }
    }
    dp.cpu = sentinel_mul(ti, d.cpu);
    const auto& nbr = inst.graph.out_neighbors(i);
    const auto& eids = inst.graph.out_edges(i);
    for (size_t s = 0; s < nbr.size(); ++s) {
      double deriv = inst.cost.link[static_cast<size_t>(eids[s])].derivative(flows.F[static_cast<size_t>(eids[s])]);
      double term = link_term(L, deriv);
      d.out[s] = (term == kInf) ? kInf : term + dt_k[static_cast<size_t>(nbr[s])];
      dp.out[s] = sentinel_mul(ti, d.out[s]);
    }
  }
}

}  // namespace

MarginalState compute_marginals(const Instance& inst, const Strategy& phi, const FlowState& flows) {
  MarginalState m;
  shape_like_strategy(inst, m);
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    for (int k = app.chain_len; k >= 0; --k) {
      auto order = stage_topological_order(inst, phi, a, k);
      auto& dt_k = m.dD_dt[static_cast<size_t>(a)][static_cast<size_t>(k)];
      const std::vector<double>* dt_k1 =
          (k < app.chain_len) ? &m.dD_dt[static_cast<size_t>(a)][static_cast<size_t>(k + 1)] : nullptr;
      // Downstream values must be final before upstream nodes read them, so
      // walk the stage DAG in reverse topological order.
      for (auto it = order.rbegin(); it != order.rend(); ++it)
        dt_k[static_cast<size_t>(*it)] = node_value(inst, phi, flows, a, k, *it, dt_k, dt_k1);
      fill_direction_marginals(inst, flows, a, k, m);
    }
  }
  return m;
}

int RoundLog::completion_rounds(AppId a, int k) const {
  int done = 0;
  for (const auto& r : rounds)
    if (r.app == a && r.k == k && r.messages > 0) ++done;
  return done;
}

std::string RoundLog::to_csv() const {
  std::ostringstream os;
  os << "app,phase,round,messages\n";
  for (const auto& r : rounds) os << r.app << "," << r.k << "," << r.round << "," << r.messages << "\n";
  return os.str();
}

BroadcastResult broadcast_marginals(const Instance& inst, const Strategy& phi, const FlowState& flows) {
  BroadcastResult res;
  MarginalState& m = res.marginals;
  shape_like_strategy(inst, m);
  int n = inst.graph.node_count();
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    // Phases run from the final stage down; each phase floods one stage's
    // dD_dt values against the direction of traffic.
    for (int k = app.chain_len; k >= 0; --k) {
      auto& dt_k = m.dD_dt[static_cast<size_t>(a)][static_cast<size_t>(k)];
      const std::vector<double>* dt_k1 =
          (k < app.chain_len) ? &m.dD_dt[static_cast<size_t>(a)][static_cast<size_t>(k + 1)] : nullptr;
      std::vector<int> waiting(static_cast<size_t>(n), 0);  // unfinished downstream neighbors
      for (NodeId i = 0; i < n; ++i) {
        const Row& r = phi.row(a, k, i);
        for (double v : r.out)
          if (v > kEpsPhi) ++waiting[static_cast<size_t>(i)];
      }
      std::vector<char> computed(static_cast<size_t>(n), 0);
      int remaining = n;
      int round = 0;
      while (remaining > 0) {
        ++round;
        std::vector<NodeId> now;
        for (NodeId i = 0; i < n; ++i)
          if (!computed[static_cast<size_t>(i)] && waiting[static_cast<size_t>(i)] == 0) now.push_back(i);
        if (now.empty()) {
          std::vector<NodeId> stuck;
          for (NodeId i = 0; i < n; ++i)
            if (!computed[static_cast<size_t>(i)]) stuck.push_back(i);
          throw LoopError(a, k, stuck,
                          "marginal exchange deadlock at stage (" + std::to_string(a) + "," + std::to_string(k) +
                              "): " + std::to_string(stuck.size()) + " nodes wait on each other");
        }
        long messages = 0;
        for (NodeId i : now) {
          dt_k[static_cast<size_t>(i)] = node_value(inst, phi, flows, a, k, i, dt_k, dt_k1);
          computed[static_cast<size_t>(i)] = 1;
          --remaining;
          // One message up every incoming positive-fraction link.
          for (EdgeId e : inst.graph.in_edges(i)) {
            NodeId p = inst.graph.edge(e).from;
            if (phi.toward(inst, a, k, p, i) > kEpsPhi) {
              ++messages;
              --waiting[static_cast<size_t>(p)];
            }
          }
        }
        res.log.rounds.push_back({a, k, round, messages});
      }
      fill_direction_marginals(inst, flows, a, k, m);
    }
  }
  return res;
}

}  // namespace chainflow
