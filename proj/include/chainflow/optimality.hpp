#pragma once

#include <string>
#include <vector>

#include "chainflow/marginal.hpp"

namespace chainflow {

// Per-row slack of a first-order optimality condition: how far the worst
// active direction (fraction > kEpsPhi) sits above the row's best direction.
struct OptimalityRow {
  NodeId node;
  AppId app;
  int k;
  double residual;
  bool degenerate;  // row currently carries no traffic (stationarity check only)
};

struct OptimalityReport {
  std::vector<OptimalityRow> rows;  // only rows with active directions
  double max_residual = 0.0;
  double tol = 0.0;
  bool satisfied = false;
  std::string to_json_string(int indent = 2) const;
};

// Stationarity (KKT) check on dD_dphi: every active direction of every row
// must achieve the row minimum of dD_dphi. Rows with zero traffic satisfy
// this vacuously (their dD_dphi is identically zero) and are flagged
// `degenerate`: passing here does NOT certify optimality.
OptimalityReport check_kkt(const Instance& inst, const Strategy& phi, const FlowState& flows,
                           const MarginalState& marg, double tol);

// Sufficiency check on delta: every active direction must achieve the row
// minimum of delta. Traffic-free, hence no vacuous rows; a strategy passing
// this at every row is globally optimal.
OptimalityReport check_sufficiency(const Instance& inst, const Strategy& phi, const MarginalState& marg,
                                   double tol);

// Known-answer family exposing the gap between the two conditions: a 4-node
// instance (single task, data enters node 0, only node 3 can compute, linear
// costs) plus a strategy that routes everything over expensive direct links.
// A zero-traffic row at node 1 points toward another expensive link, so the
// stationarity check passes everywhere, yet total cost is 1 while the true
// optimum routes 0->1->2->3 at cost rho.
struct DegenerateInstance {
  Instance instance;
  Strategy kkt_strategy;
  double rho;
};
DegenerateInstance build_degenerate_instance(double rho);

}  // namespace chainflow
