#include "chainflow/gp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chainflow/flow.hpp"
#include "chainflow/format.hpp"
#include "chainflow/json_io.hpp"
#include "chainflow/layered.hpp"

namespace chainflow {

using json = nlohmann::json;

BlockedSets compute_blocked_sets(const Instance& inst, const Strategy& phi, const MarginalState& marg) {
  BlockedSets b;
  int n = inst.graph.node_count();
  b.blocked.resize(inst.apps.size());
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    b.blocked[static_cast<size_t>(a)].resize(static_cast<size_t>(app.stage_count()));
    for (int k = 0; k <= app.chain_len; ++k) {
      const auto& dt = marg.dD_dt[static_cast<size_t>(a)][static_cast<size_t>(k)];
      // A node is tainted when some positive-fraction path from it crosses a
      // link whose dD_dt does not strictly decrease. Sweep the stage DAG
      // downstream-first so each node sees its neighbors' final flags.
      std::vector<char> tainted(static_cast<size_t>(n), 0);
      auto order = stage_topological_order(inst, phi, a, k);
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        NodeId p = *it;
        const Row& r = phi.row(a, k, p);
        const auto& nbr = inst.graph.out_neighbors(p);
        for (size_t s = 0; s < nbr.size(); ++s) {
          if (r.out[s] <= kEpsPhi) continue;
          NodeId q = nbr[s];
          if (dt[static_cast<size_t>(q)] >= dt[static_cast<size_t>(p)] || tainted[static_cast<size_t>(q)]) {
            tainted[static_cast<size_t>(p)] = 1;
            break;
          }
        }
      }
      auto& stage = b.blocked[static_cast<size_t>(a)][static_cast<size_t>(k)];
      stage.resize(static_cast<size_t>(n));
      for (NodeId i = 0; i < n; ++i) {
        const Row& r = phi.row(a, k, i);
        const auto& nbr = inst.graph.out_neighbors(i);
        auto& slots = stage[static_cast<size_t>(i)];
        slots.assign(1 + nbr.size(), 0);
        // Slot 0 is the CPU: unusable at the final stage or without the task.
        if (k == app.chain_len || app.weight(k, i) == kInf) slots[0] = 1;
        for (size_t s = 0; s < nbr.size(); ++s) {
          NodeId j = nbr[s];
          bool uphill = r.out[s] > kEpsPhi ? dt[static_cast<size_t>(j)] > dt[static_cast<size_t>(i)]
                                           : dt[static_cast<size_t>(j)] >= dt[static_cast<size_t>(i)];
          if (uphill || tainted[static_cast<size_t>(j)]) slots[1 + s] = 1;
        }
      }
    }
  }
  return b;
}

namespace {

bool mask_allows(const DirectionMask* allowed, AppId a, int k, NodeId i, int slot) {
  if (allowed == nullptr || allowed->empty()) return true;
  const DirectionMask::RowMask& m =
      allowed->rows[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)];
  if (slot == 0) return m.cpu;
  return m.out[static_cast<size_t>(slot - 1)] != 0;
}

// Restores a row's sum to exactly `target` by adjusting its largest entry,
// then zeroes anything at or below kEpsPhi (compensating on the same entry).
void restore_row_sum(Row& r, double target) {
  for (double& v : r.out)
    if (v <= kEpsPhi) v = 0.0;
  if (r.cpu <= kEpsPhi) r.cpu = 0.0;
  double* largest = &r.cpu;
  for (double& v : r.out)
    if (v > *largest) largest = &v;
  if (*largest <= 0.0) return;  // row is empty; caller decides what to do
  double sum = r.cpu;
  for (double v : r.out) sum += v;
  *largest += target - sum;
}

}  // namespace

StepReport gp_step(const Instance& inst, Strategy& phi, const MarginalState& marg, const BlockedSets& blocked,
                   const GPParams& params, double step_scale, const DirectionMask* allowed, bool final_stage_only,
                   const FlowState* flows, StepParts parts) {
  StepReport rep;
  // Blocked directions drain fully even when the proportional part of the
  // step is backtracked: small improper-link masses taint whole upstream
  // regions, and emptying them is what dissolves the taint. Only in the deep
  // backtracking tail (scale below ~1e-6) does the drain shrink too, so the
  // whole update can still be made arbitrarily small.
  double drain_frac = std::min(1.0, step_scale * 1048576.0);
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    int k_lo = final_stage_only ? app.chain_len : 0;
    for (int k = k_lo; k <= app.chain_len; ++k) {
      const auto& dstage = marg.delta[static_cast<size_t>(a)][static_cast<size_t>(k)];
      for (NodeId i = 0; i < inst.graph.node_count(); ++i) {
        if (i == app.destination && k == app.chain_len) continue;
        Row& r = phi.row(a, k, i);
        double target = r.sum();
        if (target <= kEpsRowSum) continue;
        bool idle = flows != nullptr &&
                    flows->t[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)] == 0.0;
        if (parts == StepParts::Backtracked && idle) continue;
        const Row& d = dstage[static_cast<size_t>(i)];
        int nslots = 1 + static_cast<int>(r.out.size());
        auto usable = [&](int s) {
          return !blocked.is_blocked(a, k, i, s) && mask_allows(allowed, a, k, i, s);
        };
        double dmin = kInf;
        int argmin = -1;
        for (int s = 0; s < nslots; ++s) {
          if (!usable(s)) continue;
          double ds = s == 0 ? d.cpu : d.out[static_cast<size_t>(s - 1)];
          if (ds < dmin) {
            dmin = ds;
            argmin = s;
          }
        }
        if (dmin == kInf) {
          ++rep.frozen_rows;  // nowhere to send anything; keep the row as-is
          continue;
        }
        // Largest finite excess, for the per-row stepsize normalization.
        double emax = 0.0;
        for (int s = 0; s < nslots; ++s) {
          double ds = s == 0 ? d.cpu : d.out[static_cast<size_t>(s - 1)];
          if (ds != kInf && usable(s)) emax = std::max(emax, ds - dmin);
        }
        double step = params.alpha * step_scale;
        if (params.scale_per_row && emax > 0.0) step /= emax;
        // Sensitivity of a direction's marginal to its own row fraction:
        // shifting mass x changes the direction's load by m * t * x, and its
        // marginal by about m^2 c'' t x.
        double t_here = flows == nullptr ? 0.0 : flows->t[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)];
        auto curvature = [&](int s) -> double {
          if (s == 0) {
            double w = app.weight(k, i);
            return w * w * inst.cost.node[static_cast<size_t>(i)].second_derivative(flows->G[static_cast<size_t>(i)]);
          }
          EdgeId e = inst.graph.out_edges(i)[static_cast<size_t>(s - 1)];
          double L = app.packet_size[static_cast<size_t>(k)];
          return L * L * inst.cost.link[static_cast<size_t>(e)].second_derivative(flows->F[static_cast<size_t>(e)]);
        };
        double curve_min = t_here > 0.0 ? curvature(argmin) : 0.0;
        // Count the slots about to shed: they all pour into the same
        // minimizers, so each one's balance point must account for the
        // winner's marginal rising under the combined inflow.
        int n_shed = 0;
        if (t_here > 0.0) {
          for (int s = 0; s < nslots; ++s) {
            double slot = s == 0 ? r.cpu : r.out[static_cast<size_t>(s - 1)];
            double ds = s == 0 ? d.cpu : d.out[static_cast<size_t>(s - 1)];
            if (slot > 0.0 && usable(s) && ds != kInf && ds > dmin + kEpsTie) ++n_shed;
          }
        }
        double freed = 0.0;
        std::vector<int> winners;
        for (int s = 0; s < nslots; ++s) {
          double& slot = s == 0 ? r.cpu : r.out[static_cast<size_t>(s - 1)];
          double ds = s == 0 ? d.cpu : d.out[static_cast<size_t>(s - 1)];
          if (usable(s) && ds <= dmin + kEpsTie) {
            winners.push_back(s);
            continue;
          }
          if (slot <= 0.0) continue;
          // A blocked direction that beats every usable one is blocked purely
          // for loop prevention; emptying it costs at first order.
          bool forced = !usable(s) && ds < dmin;
          double cut;
          if (idle) {
            if (parts == StepParts::Backtracked) continue;
            // The row carries no traffic, so moving its mass costs nothing;
            // take it to the minimizers at once. Other rows still feel this
            // row through dD_dt, which averages its directions' marginals.
            cut = slot;
          } else if (forced) {
            if (parts == StepParts::Backtracked) continue;
            // Halve per call so the transient cost bump decays geometrically;
            // finish off a residue outright.
            cut = slot <= 1e-6 ? slot : 0.5 * slot;
          } else if (parts == StepParts::Unconditional) {
            continue;
          } else if (!usable(s) || ds == kInf) {
            cut = slot * drain_frac;
          } else {
            cut = std::min(slot, step * (ds - dmin));
            if (t_here > 0.0) {
              // Cap at the estimated balance point: past it the shed
              // direction's marginal would dip below the winner's.
              double h = t_here * (curvature(s) + static_cast<double>(n_shed) * curve_min);
              if (h > 0.0 && h < kInf) cut = std::min(cut, step_scale * (ds - dmin) / h);
            }
          }
          slot -= cut;
          freed += cut;
        }
        if (freed > 0.0) {
          double share = freed / static_cast<double>(winners.size());
          for (int s : winners) (s == 0 ? r.cpu : r.out[static_cast<size_t>(s - 1)]) += share;
          rep.mass_moved += freed;
          ++rep.rows_changed;
        }
        restore_row_sum(r, target);
      }
    }
  }
  return rep;
}

double masked_sufficiency_residual(const Instance& inst, const Strategy& phi, const MarginalState& marg,
                                   const DirectionMask* allowed, bool final_stage_only) {
  double worst = 0.0;
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    int k_lo = final_stage_only ? app.chain_len : 0;
    for (int k = k_lo; k <= app.chain_len; ++k) {
      for (NodeId i = 0; i < inst.graph.node_count(); ++i) {
        if (i == app.destination && k == app.chain_len) continue;
        const Row& r = phi.row(a, k, i);
        const Row& d = marg.delta[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)];
        double best = kInf;
        double active = -kInf;
        if (k < app.chain_len && mask_allows(allowed, a, k, i, 0)) best = std::min(best, d.cpu);
        if (r.cpu > kEpsPhi) active = std::max(active, d.cpu);
        for (size_t s = 0; s < r.out.size(); ++s) {
          if (mask_allows(allowed, a, k, i, static_cast<int>(s) + 1)) best = std::min(best, d.out[s]);
          if (r.out[s] > kEpsPhi) active = std::max(active, d.out[s]);
        }
        if (active == -kInf) continue;
        double res = active == kInf ? (best == kInf ? 0.0 : kInf) : active - best;
        worst = std::max(worst, res);
      }
    }
  }
  return worst;
}

std::vector<Event> Event::from_json_string(const std::string& text) {
  json j = json::parse(text);
  if (!j.is_array()) throw ValidationError("events file must contain a JSON array");
  std::vector<Event> out;
  for (const auto& e : j) {
    Event ev;
    ev.iter = e.at("iter").get<int>();
    if (ev.iter < 0) throw ValidationError("event iter must be nonnegative");
    std::string kind = e.at("kind").get<std::string>();
    if (kind == "rate-change") {
      ev.kind = Kind::RateChange;
      ev.app = e.at("app").get<AppId>();
      ev.node = e.at("node").get<NodeId>();
      ev.rate = e.at("rate").get<double>();
      if (ev.rate < 0) throw ValidationError("event rate must be nonnegative");
    } else if (kind == "link-remove") {
      ev.kind = Kind::LinkRemove;
      ev.from = e.at("from").get<NodeId>();
      ev.to = e.at("to").get<NodeId>();
    } else if (kind == "link-add") {
      ev.kind = Kind::LinkAdd;
      ev.from = e.at("from").get<NodeId>();
      ev.to = e.at("to").get<NodeId>();
      ev.link_cost = cost_from_json(e.at("cost"));
    } else if (kind == "node-add") {
      ev.kind = Kind::NodeAdd;
      ev.node_cost = cost_from_json(e.at("cost"));
      if (e.contains("comp_weight")) {
        const auto& w = e.at("comp_weight");
        ev.node_comp_weight = w.is_null() ? kInf : w.get<double>();
      }
      if (e.contains("edges")) {
        for (const auto& pair : e.at("edges"))
          ev.new_edges.emplace_back(pair.at(0).get<NodeId>(), pair.at(1).get<NodeId>());
        if (!e.contains("edge_costs")) throw ValidationError("node-add with edges needs edge_costs");
        const auto& costs = e.at("edge_costs");
        if (costs.is_object()) {
          ev.new_edge_costs.assign(ev.new_edges.size(), cost_from_json(costs));
        } else {
          for (const auto& c : costs) ev.new_edge_costs.push_back(cost_from_json(c));
          if (ev.new_edge_costs.size() != ev.new_edges.size())
            throw ValidationError("edge_costs must match edges");
        }
      }
    } else {
      throw ValidationError("unknown event kind '" + kind + "'");
    }
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<Event> Event::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open events file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

namespace {

// Repoints (a,k,i) along freshly computed zero-load shortest-path labels,
// overwriting every row on the walked path. Needed when every out-neighbor
// of i currently routes back through i (e.g. i just lost its only link
// toward the destination): no single-row change is loop-free, so the whole
// escape path must switch over. The rewritten rows follow the label tree,
// whose ranks strictly decrease along the walk, so the stage stays acyclic:
// a cycle would need an untouched row, and from any rewritten row the walk
// runs straight to its terminal.
void reroute_along_labels(const Instance& inst, Strategy& phi, AppId a, int k, NodeId i) {
  const Application& app = inst.app(a);
  LayeredLabels labels = layered_shortest_to_dest(
      inst, a, [&](EdgeId e) { return inst.cost.link[static_cast<size_t>(e)].derivative(0.0); },
      [&](NodeId v) { return inst.cost.node[static_cast<size_t>(v)].derivative(0.0); });
  NodeId cur = i;
  while (!(k == app.chain_len && cur == app.destination)) {
    int act = labels.next[static_cast<size_t>(k)][static_cast<size_t>(cur)];
    if (act == LayeredLabels::kNextNone)
      throw ValidationError("no loop-free repair for the routing row of node " + std::to_string(i) +
                            " at stage (" + std::to_string(a) + "," + std::to_string(k) +
                            "): destination unreachable from node " + std::to_string(cur));
    Row& r = phi.row(a, k, cur);
    r.cpu = 0.0;
    std::fill(r.out.begin(), r.out.end(), 0.0);
    if (act == LayeredLabels::kNextCpu) {
      r.cpu = 1.0;  // hands over to the (intact) stage-(k+1) row of cur
      return;
    }
    NodeId nxt = inst.graph.edge(act).to;
    r.out[static_cast<size_t>(inst.graph.out_slot(cur, nxt))] = 1.0;
    cur = nxt;
  }
}

// Gives an empty row one loop-free direction: the CPU when the node can run
// the task, otherwise the lowest-id neighbor that keeps the stage acyclic,
// otherwise a full path rewrite along fresh shortest-path labels.
void repair_row(const Instance& inst, Strategy& phi, AppId a, int k, NodeId i) {
  const Application& app = inst.app(a);
  if (i == app.destination && k == app.chain_len) return;
  Row& r = phi.row(a, k, i);
  r.cpu = 0.0;
  std::fill(r.out.begin(), r.out.end(), 0.0);
  if (k < app.chain_len && app.weight(k, i) != kInf) {
    r.cpu = 1.0;
    return;
  }
  for (size_t s = 0; s < r.out.size(); ++s) {
    r.out[s] = 1.0;
    try {
      stage_topological_order(inst, phi, a, k);
      return;
    } catch (const LoopError&) {
      r.out[s] = 0.0;
    }
  }
  reroute_along_labels(inst, phi, a, k, i);
}

// After a graph mutation: rescale rows that lost part of their mass, rebuild
// rows that lost everything.
void repair_strategy(const Instance& inst, Strategy& phi) {
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    for (int k = 0; k <= app.chain_len; ++k) {
      for (NodeId i = 0; i < inst.graph.node_count(); ++i) {
        if (i == app.destination && k == app.chain_len) continue;
        Row& r = phi.row(a, k, i);
        double s = r.sum();
        if (std::abs(s - 1.0) <= kEpsRowSum) continue;
        if (s <= kEpsRowSum) {
          repair_row(inst, phi, a, k, i);
          continue;
        }
        r.cpu /= s;
        for (double& v : r.out) v /= s;
        restore_row_sum(r, 1.0);
      }
    }
  }
}

}  // namespace

void apply_event(GPState& state, const Event& ev) {
  Instance& inst = state.instance;
  int n = inst.graph.node_count();
  switch (ev.kind) {
    case Event::Kind::RateChange: {
      if (ev.app < 0 || ev.app >= inst.app_count()) throw ValidationError("rate-change: app out of range");
      if (ev.node < 0 || ev.node >= n) throw ValidationError("rate-change: node out of range");
      inst.apps[static_cast<size_t>(ev.app)].input_rate[static_cast<size_t>(ev.node)] = ev.rate;
      return;
    }
    case Event::Kind::LinkRemove: {
      EdgeId e = inst.graph.edge_between(ev.from, ev.to);
      if (e < 0) throw ValidationError("link-remove: no such edge");
      Instance old = inst;
      inst.cost.link.erase(inst.cost.link.begin() + e);
      inst.graph.remove_edge(ev.from, ev.to);
      state.strategy.remap(old, inst);
      repair_strategy(inst, state.strategy);
      return;
    }
    case Event::Kind::LinkAdd: {
      Instance old = inst;
      inst.graph.add_edge(ev.from, ev.to);
      inst.cost.link.push_back(ev.link_cost);
      state.strategy.remap(old, inst);
      return;  // the new direction starts at fraction zero
    }
    case Event::Kind::NodeAdd: {
      Instance old = inst;
      NodeId v = inst.graph.add_node();
      inst.cost.node.push_back(ev.node_cost);
      for (size_t x = 0; x < ev.new_edges.size(); ++x) {
        inst.graph.add_edge(ev.new_edges[x].first, ev.new_edges[x].second);
        inst.cost.link.push_back(x < ev.new_edge_costs.size() ? ev.new_edge_costs[x] : ev.link_cost);
      }
      for (Application& app : inst.apps) {
        app.input_rate.push_back(0.0);
        for (auto& row : app.comp_weight) row.push_back(ev.node_comp_weight);
      }
      inst.validate();
      state.strategy.remap(old, inst);
      repair_strategy(inst, state.strategy);
      (void)v;
      return;
    }
  }
}

std::string GPResult::status_name() const {
  switch (status) {
    case GPStatus::Converged: return "converged";
    case GPStatus::Stalled: return "stalled";
    case GPStatus::MaxIters: return "max-iters";
    case GPStatus::Diverged: return "diverged";
  }
  return "unknown";
}

std::string GPResult::trajectory_csv() const {
  std::ostringstream os;
  os << "iter,cost,residual,loop_free,messages\n";
  for (const auto& r : trajectory)
    os << r.iter << "," << fmt_double(r.cost) << "," << fmt_double(r.residual) << "," << (r.loop_free ? 1 : 0) << ","
       << r.messages << "\n";
  return os.str();
}

GPResult run_gp(const Instance& inst, const Strategy& initial, const GPParams& params, const RunOptions& opts) {
  GPState st{inst, initial};
  std::vector<Event> events = opts.events;
  std::stable_sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.iter < y.iter; });
  size_t next_event = 0;

  GPResult res;
  const DirectionMask* mask = opts.allowed.empty() ? nullptr : &opts.allowed;
  double prev_cost = kInf;
  double best_residual = kInf;
  int stall_run = 0;

  for (int iter = 0; iter < params.max_iters; ++iter) {
    // A settled run with events still scheduled idles forward to the next
    // one instead of terminating: the loop simulates an online controller,
    // and a scripted change must still arrive after convergence.
    auto jump_to_next_event = [&](int& it) -> bool {
      if (next_event >= events.size()) return false;
      int target = events[next_event].iter;
      if (target >= params.max_iters) return false;  // out of iteration budget
      it = std::max(it, target - 1);                 // ++it lands on the event
      stall_run = 0;
      prev_cost = kInf;
      best_residual = kInf;
      return true;
    };
    while (next_event < events.size() && events[next_event].iter <= iter) {
      apply_event(st, events[next_event]);
      ++next_event;
    }
    FlowState flows = solve_traffic(st.instance, st.strategy);  // throws on a loop
    double cost = total_cost(st.instance, flows);
    MarginalState marg;
    long messages = 0;
    if (params.distributed) {
      BroadcastResult br = broadcast_marginals(st.instance, st.strategy, flows);
      marg = std::move(br.marginals);
      messages = br.log.total_messages();
      res.round_log = std::move(br.log);  // keep the latest iteration's log
    } else {
      marg = compute_marginals(st.instance, st.strategy, flows);
    }
    double residual = masked_sufficiency_residual(st.instance, st.strategy, marg, mask, opts.final_stage_only);

    bool loop_free = true;
    if (opts.check_every_iteration) {
      ValidationReport vr = validate_strategy(st.instance, st.strategy);
      loop_free = vr.ok();
      if (!loop_free)
        throw ValidationError("strategy validation failed at iteration " + std::to_string(iter) + ": " +
                              vr.to_json_string(0));
    }
    res.trajectory.push_back({iter, cost, residual, loop_free, messages});
    res.iterations = iter + 1;
    res.final_cost = cost;
    res.final_residual = residual;

    if (cost == kInf) {
      if (jump_to_next_event(iter)) continue;  // a scripted change may restore feasibility
      res.status = GPStatus::Diverged;
      break;
    }
    if (residual <= params.tol) {
      if (jump_to_next_event(iter)) continue;
      res.status = GPStatus::Converged;
      break;
    }
    // Stalling means neither the cost nor the residual is improving: the
    // residual can keep contracting (or idle mass keep migrating) while the
    // cost changes stay below measurement noise, and that is still progress.
    bool residual_low = residual < best_residual * (1.0 - 1e-3);
    if (residual_low) best_residual = residual;
    if (iter > 0 && std::abs(cost - prev_cost) < params.stall_cost_tol && !residual_low) {
      if (++stall_run >= params.stall_window) {
        if (jump_to_next_event(iter)) continue;
        res.status = GPStatus::Stalled;
        break;
      }
    } else {
      stall_run = 0;
    }
    prev_cost = cost;

    BlockedSets blocked = compute_blocked_sets(st.instance, st.strategy, marg);
    if (!params.backtracking) {
      gp_step(st.instance, st.strategy, marg, blocked, params, 1.0, mask, opts.final_stage_only, &flows);
      continue;
    }
    // Moves that cost-based acceptance cannot govern come first: idle-row
    // transport (changes no load, so acceptance only sees recomputation
    // noise) and forced drains (loop-prevention moves that acceptance would
    // always veto). When anything moved, restart the iteration so the step
    // below works from fresh marginals and a fresh cost baseline.
    StepReport pre_rep =
        gp_step(st.instance, st.strategy, marg, blocked, params, 1.0, mask, opts.final_stage_only, &flows,
                StepParts::Unconditional);
    if (pre_rep.mass_moved > 0.0) continue;
    double scale = 1.0;
    bool accepted = false;
    for (int half = 0; half <= 40; ++half) {
      Strategy cand = st.strategy;
      gp_step(st.instance, cand, marg, blocked, params, scale, mask, opts.final_stage_only, &flows,
              StepParts::Backtracked);
      double cand_cost = total_cost(st.instance, cand);
      // The slack is a few ulps: just enough to admit cost-neutral moves
      // (blocked-direction drains on their own) whose recomputed cost wiggles
      // with summation order, without admitting real increases that would let
      // the iterate wander around an optimum.
      if (cand_cost <= cost + 4e-15 * std::max(1.0, std::abs(cost))) {
        st.strategy = std::move(cand);
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      // No step of any tried size helps; leave the strategy in place and let
      // the stall detector conclude.
    }
  }

  if (res.trajectory.empty()) {
    FlowState flows = solve_traffic(st.instance, st.strategy);
    res.final_cost = total_cost(st.instance, flows);
    MarginalState marg = compute_marginals(st.instance, st.strategy, flows);
    res.final_residual = masked_sufficiency_residual(st.instance, st.strategy, marg, mask, opts.final_stage_only);
  }
  res.strategy = std::move(st.strategy);
  res.final_instance = std::move(st.instance);
  return res;
}

}  // namespace chainflow
