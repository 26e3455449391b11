#pragma once

// Shared instance builders for the test suites. All are small enough to
// reason about by hand; the expected numbers in the tests were derived by
// working the traffic and marginal recursions on paper.

#include <vector>

#include "chainflow/init.hpp"
#include "chainflow/instance.hpp"
#include "chainflow/scenarios.hpp"
#include "chainflow/strategy.hpp"

namespace cft {

using namespace chainflow;

// 3-node directed path 0 -> 1 -> 2 with one single-task application:
// data enters at node 0 (rate r), destination node 2, every node can
// compute, packet sizes [L0, L1].
inline Instance line_instance(double r = 2.0, double L0 = 4.0, double L1 = 1.0) {
  Instance inst;
  inst.graph = NetworkGraph(3, {{0, 1}, {1, 2}});
  inst.cost.link = {CostFn::linear(1.0), CostFn::linear(2.0)};
  inst.cost.node = {CostFn::linear(3.0), CostFn::linear(1.0), CostFn::linear(5.0)};
  Application app;
  app.id = 0;
  app.chain_len = 1;
  app.destination = 2;
  app.packet_size = {L0, L1};
  app.input_rate = {r, 0.0, 0.0};
  app.comp_weight = {{1.0, 1.0, 1.0}};
  inst.apps = {app};
  inst.validate();
  return inst;
}

// Strategy for line_instance: node 0 computes a fraction `q` locally and
// forwards 1-q to node 1, node 1 computes everything it receives, results
// ride the path to node 2.
inline Strategy line_strategy(const Instance& inst, double q) {
  Strategy phi(inst);
  phi.row(0, 0, 0).cpu = q;
  phi.set_toward(inst, 0, 0, 0, 1, 1.0 - q);
  phi.row(0, 0, 1).cpu = 1.0;
  phi.row(0, 0, 2).cpu = 1.0;
  phi.set_toward(inst, 0, 1, 0, 1, 1.0);
  phi.set_toward(inst, 0, 1, 1, 2, 1.0);
  return phi;
}

// 4-node diamond: 0 -> {1,2} -> 3 plus the chord 1 -> 2. One single-task
// app from node 0 to node 3; only nodes 1, 2, 3 can compute.
inline Instance diamond_instance() {
  Instance inst;
  inst.graph = NetworkGraph(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}});
  inst.cost.link = {CostFn::queue(20.0), CostFn::queue(20.0), CostFn::queue(20.0), CostFn::queue(20.0),
                    CostFn::queue(20.0)};
  inst.cost.node = {CostFn::queue(8.0), CostFn::queue(8.0), CostFn::queue(8.0), CostFn::queue(8.0)};
  Application app;
  app.id = 0;
  app.chain_len = 1;
  app.destination = 3;
  app.packet_size = {4.0, 1.0};
  app.input_rate = {1.5, 0.0, 0.0, 0.0};
  app.comp_weight = {{kInf, 1.0, 1.0, 1.0}};
  inst.apps = {app};
  inst.validate();
  return inst;
}

// Seeded generator instance small enough for exhaustive checks but with
// real congestion coupling (tight CPUs, roomy links, so offloading moves
// data around).
inline Instance small_coupled_instance(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.topology = Topology::ConnectedER;
  cfg.nodes = 8;
  cfg.links = 10;
  cfg.apps = 2;
  cfg.sources_per_app = 2;
  cfg.chain_len = 2;
  cfg.link_mean = 60.0;
  cfg.comp_mean = 6.0;
  cfg.seed = seed;
  return generate_scenario(cfg);
}

// Central finite difference of the total cost in one fraction coordinate
// (slot 0 = CPU, slot s >= 1 = the (s-1)-th out-neighbor), holding every
// other fraction fixed -- the unconstrained partial derivative the chain
// rule computes. Only call on coordinates that are already positive, so the
// perturbed positive-fraction subgraph (and hence its acyclicity) does not
// change.
inline double fd_dphi(const Instance& inst, const Strategy& phi, AppId a, int k, NodeId i, int slot,
                      double h = 1e-6) {
  auto eval = [&](double step) {
    Strategy p = phi;
    Row& r = p.row(a, k, i);
    if (slot == 0)
      r.cpu += step;
    else
      r.out[static_cast<size_t>(slot - 1)] += step;
    return total_cost(inst, solve_traffic(inst, p));
  };
  return (eval(h) - eval(-h)) / (2.0 * h);
}

}  // namespace cft
