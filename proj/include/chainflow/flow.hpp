#pragma once

#include <string>
#include <vector>

#include "chainflow/strategy.hpp"

namespace chainflow {

// Steady-state traffic induced by a loop-free strategy.
//   t[a][k][i]  stage-(a,k) packet rate handled by node i
//   g[a][k][i]  stage-(a,k) packet rate node i sends to its CPU
//   f[a][k][e]  stage-(a,k) packet rate on edge e
//   F[e]        aggregate bit rate on edge e   (sum_k packet_size[k] * f)
//   G[i]        aggregate workload at node i   (sum_k comp_weight[k] * g)
struct FlowState {
  std::vector<std::vector<std::vector<double>>> t;
  std::vector<std::vector<std::vector<double>>> g;
  std::vector<std::vector<std::vector<double>>> f;
  std::vector<double> F;
  std::vector<double> G;
};

struct ValidationReport {
  struct SimplexViolation {
    AppId app;
    int k;
    NodeId node;
    double row_sum;
    double expected;
  };
  struct LoopViolation {
    AppId app;
    int k;
    std::vector<NodeId> cycle;  // nodes of the positive-fraction cycle
  };
  struct CpuViolation {
    AppId app;
    int k;
    NodeId node;
    double fraction;
    std::string reason;  // "final-stage" or "incapable"
  };

  std::vector<SimplexViolation> simplex;
  std::vector<LoopViolation> loops;
  std::vector<CpuViolation> cpu;

  bool ok() const { return simplex.empty() && loops.empty() && cpu.empty(); }
  std::string to_json_string(int indent = 2) const;
};

// Checks row sums, per-stage loop-freedom of the positive-fraction subgraph,
// and CPU shares on final stages / incapable nodes. Never throws.
ValidationReport validate_strategy(const Instance& inst, const Strategy& phi);

// Topological order of the stage-(a,k) positive-fraction subgraph (edges with
// fraction > kEpsPhi). Throws LoopError when the subgraph has a cycle.
std::vector<NodeId> stage_topological_order(const Instance& inst, const Strategy& phi, AppId a, int k);

// Solves the stage traffic equations by sweeping each stage's DAG in
// topological order; stage k >= 1 is fed by the CPU output of stage k-1.
// Fractions at or below kEpsPhi are treated as exactly zero.
FlowState solve_traffic(const Instance& inst, const Strategy& phi);

// Total cost: sum of link costs at loads F plus node costs at loads G.
// +inf when any load is at or beyond capacity.
double total_cost(const Instance& inst, const FlowState& flows);
double total_cost(const Instance& inst, const Strategy& phi);

}  // namespace chainflow
