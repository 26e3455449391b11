#pragma once

#include <string>
#include <vector>

#include "chainflow/flow.hpp"
#include "chainflow/strategy.hpp"

namespace chainflow {

// First-order sensitivities of the total cost at an operating point.
//   dD_dt[a][k][i]   derivative w.r.t. the stage-(a,k) rate handled at i
//   delta[a][k][i]   per-direction marginals (Row shape): cpu slot is the
//                    cost of computing here and forwarding the stage-k+1
//                    result onward; out slot j is the cost of shipping the
//                    stage-k packet to j and continuing from there
//   dD_dphi[a][k][i] chain-rule derivative w.r.t. the row fractions:
//                    traffic rate times delta (infinite delta dominates)
// delta is traffic-free: it stays informative on rows that currently carry
// no traffic, which is what makes it usable as a descent signal everywhere.
struct MarginalState {
  std::vector<std::vector<std::vector<double>>> dD_dt;
  std::vector<std::vector<std::vector<Row>>> delta;
  std::vector<std::vector<std::vector<Row>>> dD_dphi;
};

// Computes dD_dt by the backward recursion over each stage's reversed DAG
// (final stage first, then k descending; within a stage, downstream nodes
// first), then delta and dD_dphi from it.
MarginalState compute_marginals(const Instance& inst, const Strategy& phi, const FlowState& flows);

// One record per synchronous round of the distributed marginal exchange.
struct RoundRecord {
  AppId app;
  int k;        // stage whose dD_dt values were being propagated
  int round;    // 1-based within this (app, stage) phase
  long messages;
};

struct RoundLog {
  std::vector<RoundRecord> rounds;
  long total_messages() const {
    long n = 0;
    for (const auto& r : rounds) n += r.messages;
    return n;
  }
  // Rounds that carried at least one message for (a, k): the completion time
  // of that phase in hops.
  int completion_rounds(AppId a, int k) const;
  std::string to_csv() const;  // columns: app,phase,round,messages
};

// Simulates the synchronous message-passing version: each node computes its
// dD_dt value once all downstream positive-fraction neighbors have reported
// theirs, then sends one message per positive-fraction incoming edge. Phases
// run per app from the final stage down to stage 0. Produces values
// identical to compute_marginals. Throws LoopError on deadlock (a cycle in
// some stage's positive-fraction subgraph), naming the waiting nodes.
struct BroadcastResult {
  MarginalState marginals;
  RoundLog log;
};
BroadcastResult broadcast_marginals(const Instance& inst, const Strategy& phi, const FlowState& flows);

}  // namespace chainflow
