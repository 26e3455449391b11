#include "chainflow/baselines.hpp"

#include <algorithm>

#include "chainflow/flow.hpp"
#include "chainflow/init.hpp"
#include "chainflow/layered.hpp"

namespace chainflow {

namespace {

DirectionMask full_mask_shape(const Instance& inst) {
  DirectionMask m;
  m.rows.resize(inst.apps.size());
  for (AppId a = 0; a < inst.app_count(); ++a) {
    m.rows[static_cast<size_t>(a)].resize(static_cast<size_t>(inst.app(a).stage_count()));
    for (int k = 0; k <= inst.app(a).chain_len; ++k) {
      auto& stage = m.rows[static_cast<size_t>(a)][static_cast<size_t>(k)];
      stage.resize(static_cast<size_t>(inst.graph.node_count()));
      for (NodeId i = 0; i < inst.graph.node_count(); ++i)
        stage[static_cast<size_t>(i)].out.assign(inst.graph.out_neighbors(i).size(), 0);
    }
  }
  return m;
}

BaselineResult from_gp(const std::string& method, const GPResult& r) {
  BaselineResult b;
  b.method = method;
  b.strategy = r.strategy;
  b.cost = r.final_cost;
  b.feasible = r.final_cost < kInf;
  b.converged = r.status == GPStatus::Converged;
  b.residual = r.final_residual;
  b.iterations = r.iterations;
  return b;
}

}  // namespace

BaselineResult spoc(const Instance& inst, const GPParams& params) {
  DirectionMask mask = full_mask_shape(inst);
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    TreeLabels tree = shortest_to_dest(inst.graph, app.destination,
                                       [&](EdgeId e) { return inst.cost.link[static_cast<size_t>(e)].derivative(0.0); });
    for (int k = 0; k <= app.chain_len; ++k) {
      for (NodeId i = 0; i < inst.graph.node_count(); ++i) {
        DirectionMask::RowMask& rm =
            mask.rows[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)];
        rm.cpu = k < app.chain_len && app.can_compute(k, i);
        EdgeId nx = tree.next_edge[static_cast<size_t>(i)];
        if (nx >= 0) {
          rm.out[static_cast<size_t>(inst.graph.out_slot(i, inst.graph.edge(nx).to))] = 1;
        } else if (i != app.destination) {
          // Off-tree node: leave every direction open so a row can be built.
          std::fill(rm.out.begin(), rm.out.end(), 1);
        } else if (k < app.chain_len && !rm.cpu) {
          // Destination cannot run this task; let it re-forward the work.
          std::fill(rm.out.begin(), rm.out.end(), 1);
        }
      }
    }
  }
  Strategy start = initial_strategy(inst, &mask);
  RunOptions opts;
  opts.allowed = mask;
  GPResult r = run_gp(inst, start, params, opts);
  return from_gp("spoc", r);
}

BaselineResult lcof(const Instance& inst, const GPParams& params) {
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    for (NodeId s : app.sources())
      for (int k = 0; k < app.chain_len; ++k)
        if (!app.can_compute(k, s))
          throw ValidationError("compute-at-source baseline: source " + std::to_string(s) + " of application " +
                                std::to_string(app.id) + " cannot run task " + std::to_string(k + 1));
  }
  Strategy phi(inst);
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    TreeLabels tree = shortest_to_dest(inst.graph, app.destination,
                                       [&](EdgeId e) { return inst.cost.link[static_cast<size_t>(e)].derivative(0.0); });
    for (int k = 0; k <= app.chain_len; ++k) {
      for (NodeId i = 0; i < inst.graph.node_count(); ++i) {
        if (i == app.destination && k == app.chain_len) continue;
        Row& r = phi.row(a, k, i);
        if (k < app.chain_len && app.can_compute(k, i)) {
          r.cpu = 1.0;  // sources run the whole chain here; capable bystanders would too
          continue;
        }
        EdgeId nx = tree.next_edge[static_cast<size_t>(i)];
        if (nx < 0)
          throw ValidationError("compute-at-source baseline: node " + std::to_string(i) +
                                " cannot reach the destination of application " + std::to_string(app.id));
        r.out[static_cast<size_t>(inst.graph.out_slot(i, inst.graph.edge(nx).to))] = 1.0;
      }
    }
  }
  double start_cost = total_cost(inst, phi);
  if (start_cost == kInf) {
    BaselineResult b;
    b.method = "lcof";
    b.strategy = phi;
    b.cost = kInf;
    b.feasible = false;
    b.converged = false;
    b.residual = kInf;
    return b;  // local computation saturates a node; nothing to optimize
  }
  RunOptions opts;
  opts.final_stage_only = true;
  GPResult r = run_gp(inst, phi, params, opts);
  return from_gp("lcof", r);
}

BaselineResult lpr_sc(const Instance& inst) {
  BaselineResult b;
  b.method = "lpr-sc";
  b.strategy = zero_load_tree_strategy(inst);
  b.cost = total_cost(inst, b.strategy);
  b.feasible = b.cost < kInf;
  b.converged = true;  // the relaxation itself is solved exactly
  b.residual = 0.0;
  return b;
}

namespace {

double cost_at_loads(const Instance& inst, const std::vector<double>& F, const std::vector<double>& G) {
  double total = 0.0;
  for (size_t e = 0; e < F.size(); ++e) {
    double c = inst.cost.link[e].evaluate(F[e]);
    if (c == kInf) return kInf;
    total += c;
  }
  for (size_t i = 0; i < G.size(); ++i) {
    double c = inst.cost.node[i].evaluate(G[i]);
    if (c == kInf) return kInf;
    total += c;
  }
  return total;
}

}  // namespace

OracleResult frank_wolfe_oracle(const Instance& inst, const OracleParams& params) {
  int n = inst.graph.node_count();
  int ne = inst.graph.edge_count();
  OracleResult res;

  // Start from the same finite-cost point the optimizer starts from.
  Strategy start = initial_strategy(inst);
  FlowState fs = solve_traffic(inst, start);
  res.f = std::move(fs.f);
  res.g = std::move(fs.g);
  res.F = std::move(fs.F);
  res.G = std::move(fs.G);
  res.cost = cost_at_loads(inst, res.F, res.G);

  std::vector<double> linkw(static_cast<size_t>(ne)), nodew(static_cast<size_t>(n));
  // Vertex of the linearized subproblem (per-stage flows + aggregates).
  std::vector<std::vector<std::vector<double>>> vf(res.f.size()), vg(res.g.size());
  for (size_t a = 0; a < res.f.size(); ++a) {
    vf[a].assign(res.f[a].size(), std::vector<double>(static_cast<size_t>(ne), 0.0));
    vg[a].assign(res.g[a].size(), std::vector<double>(static_cast<size_t>(n), 0.0));
  }
  std::vector<double> VF(static_cast<size_t>(ne)), VG(static_cast<size_t>(n));

  for (int t = 0; t < params.max_iters; ++t) {
    res.iterations = t;
    for (EdgeId e = 0; e < ne; ++e) linkw[static_cast<size_t>(e)] = inst.cost.link[static_cast<size_t>(e)].derivative(res.F[static_cast<size_t>(e)]);
    for (NodeId i = 0; i < n; ++i) nodew[static_cast<size_t>(i)] = inst.cost.node[static_cast<size_t>(i)].derivative(res.G[static_cast<size_t>(i)]);

    for (auto& stage : vf)
      for (auto& row : stage) std::fill(row.begin(), row.end(), 0.0);
    for (auto& stage : vg)
      for (auto& row : stage) std::fill(row.begin(), row.end(), 0.0);
    std::fill(VF.begin(), VF.end(), 0.0);
    std::fill(VG.begin(), VG.end(), 0.0);

    for (AppId a = 0; a < inst.app_count(); ++a) {
      const Application& app = inst.app(a);
      LinkWeightFn lw = [&](EdgeId e) { return linkw[static_cast<size_t>(e)]; };
      NodeWeightFn nw = [&](NodeId i) { return nodew[static_cast<size_t>(i)]; };
      LayeredLabels lab = layered_shortest_to_dest(inst, a, lw, nw);
      for (NodeId src = 0; src < n; ++src) {
        double r = app.rate(src);
        if (r <= 0) continue;
        int k = 0;
        NodeId cur = src;
        while (!(cur == app.destination && k == app.chain_len)) {
          int nx = lab.next[static_cast<size_t>(k)][static_cast<size_t>(cur)];
          if (nx == LayeredLabels::kNextNone)
            throw SaturationError("relaxation subproblem: source " + std::to_string(src) +
                                  " cannot reach the destination of application " + std::to_string(app.id));
          if (nx == LayeredLabels::kNextCpu) {
            vg[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(cur)] += r;
            VG[static_cast<size_t>(cur)] += app.weight(k, cur) * r;
            ++k;
          } else {
            vf[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(nx)] += r;
            double L = app.packet_size[static_cast<size_t>(k)];
            if (L > 0) VF[static_cast<size_t>(nx)] += L * r;
            cur = inst.graph.edge(nx).to;
          }
        }
      }
    }

    // Duality gap of the linearization, collapsed onto the aggregates.
    double gap = 0.0;
    for (EdgeId e = 0; e < ne; ++e) gap += linkw[static_cast<size_t>(e)] * (res.F[static_cast<size_t>(e)] - VF[static_cast<size_t>(e)]);
    for (NodeId i = 0; i < n; ++i) gap += nodew[static_cast<size_t>(i)] * (res.G[static_cast<size_t>(i)] - VG[static_cast<size_t>(i)]);
    res.gap = gap;
    res.lower_bound = std::max(res.lower_bound, res.cost - std::max(gap, 0.0));
    if (gap <= std::max(params.gap_tol_abs, params.gap_tol_rel * std::abs(res.cost))) {
      res.converged = true;
      break;
    }

    double gamma = 2.0 / (static_cast<double>(t) + 2.0);
    bool stepped = false;
    for (int half = 0; half <= 60; ++half) {
      std::vector<double> Fc(res.F), Gc(res.G);
      for (EdgeId e = 0; e < ne; ++e) Fc[static_cast<size_t>(e)] += gamma * (VF[static_cast<size_t>(e)] - res.F[static_cast<size_t>(e)]);
      for (NodeId i = 0; i < n; ++i) Gc[static_cast<size_t>(i)] += gamma * (VG[static_cast<size_t>(i)] - res.G[static_cast<size_t>(i)]);
      double cand = cost_at_loads(inst, Fc, Gc);
      if (cand <= res.cost + 1e-12 * std::max(1.0, std::abs(res.cost))) {
        for (size_t a = 0; a < res.f.size(); ++a) {
          for (size_t k = 0; k < res.f[a].size(); ++k)
            for (size_t e = 0; e < res.f[a][k].size(); ++e)
              res.f[a][k][e] += gamma * (vf[a][k][e] - res.f[a][k][e]);
          for (size_t k = 0; k < res.g[a].size(); ++k)
            for (size_t i = 0; i < res.g[a][k].size(); ++i)
              res.g[a][k][i] += gamma * (vg[a][k][i] - res.g[a][k][i]);
        }
        res.F = std::move(Fc);
        res.G = std::move(Gc);
        res.cost = cand;
        stepped = true;
        break;
      }
      gamma *= 0.5;
    }
    if (!stepped) break;  // no step of any size helps; report the gap honestly

    if ((t + 1) % 1000 == 0) {
      // Kill accumulated blending drift: rebuild aggregates from the flows.
      std::fill(res.F.begin(), res.F.end(), 0.0);
      std::fill(res.G.begin(), res.G.end(), 0.0);
      for (AppId a = 0; a < inst.app_count(); ++a) {
        const Application& app = inst.app(a);
        for (int k = 0; k <= app.chain_len; ++k) {
          double L = app.packet_size[static_cast<size_t>(k)];
          if (L > 0)
            for (EdgeId e = 0; e < ne; ++e) res.F[static_cast<size_t>(e)] += L * res.f[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(e)];
          if (k < app.chain_len)
            for (NodeId i = 0; i < n; ++i) {
              double g = res.g[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)];
              if (g > 0) res.G[static_cast<size_t>(i)] += app.weight(k, i) * g;
            }
        }
      }
      res.cost = cost_at_loads(inst, res.F, res.G);
    }
  }
  return res;
}

}  // namespace chainflow
