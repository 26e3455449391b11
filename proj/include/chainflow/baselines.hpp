#pragma once

#include <string>

#include "chainflow/gp.hpp"

namespace chainflow {

struct BaselineResult {
  std::string method;
  Strategy strategy;
  double cost = kInf;
  bool feasible = false;   // finite cost reached
  bool converged = false;  // inner optimization met its tolerance
  double residual = kInf;  // residual within the method's restricted space
  int iterations = 0;
};

// Shortest-path-only forwarding: per app, every stage follows the in-tree of
// zero-load link marginals D'(0) toward the destination; only the offload
// split (compute here vs. continue along the tree) is optimized, by the
// projected-descent loop restricted to {CPU, tree next hop} per row.
BaselineResult spoc(const Instance& inst, const GPParams& params);

// Compute-at-source: every source runs the whole chain locally (error if a
// source lacks compute capability for some task); only final-stage routing
// toward the destination is then optimized.
BaselineResult lcof(const Instance& inst, const GPParams& params);

// Congestion-blind layered routing: per app, a single min-cost path per
// source through the layered graph weighted at zero load (ties broken
// deterministically, so per-source paths merge into one in-tree); all flow
// rides those paths unsplit. The reported cost evaluates the true
// congestion-dependent objective and may be infinite.
BaselineResult lpr_sc(const Instance& inst);

// Frank-Wolfe on the arc-flow convex relaxation; the linearized subproblem
// is a layered shortest-path routing of every source's supply. Returns both
// the achieved cost (an upper bound on the optimum) and cost - gap (a lower
// bound). Step size 2/(t+2), halved when a step would raise the cost.
struct OracleParams {
  double gap_tol_rel = 1e-4;  // stop when gap <= rel * cost ...
  double gap_tol_abs = 0.0;   // ... or gap <= abs
  int max_iters = 2000000;
};
struct OracleResult {
  double cost = kInf;
  double gap = kInf;
  double lower_bound = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> F;  // aggregate link loads at the returned point
  std::vector<double> G;  // aggregate node loads
  // per-commodity flows: f[a][k][e], g[a][k][i]
  std::vector<std::vector<std::vector<double>>> f;
  std::vector<std::vector<std::vector<double>>> g;
};
OracleResult frank_wolfe_oracle(const Instance& inst, const OracleParams& params = {});

}  // namespace chainflow
