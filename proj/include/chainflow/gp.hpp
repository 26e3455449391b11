#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chainflow/optimality.hpp"

namespace chainflow {

// Per-row set of forbidden out-neighbor directions. Slot layout matches the
// strategy rows (out-neighbor order); the CPU direction is never blocked.
// blocked[a][k][i][slot] == true forbids that neighbor for stage (a,k).
struct BlockedSets {
  std::vector<std::vector<std::vector<std::vector<std::uint8_t>>>> blocked;
  bool is_blocked(AppId a, int k, NodeId i, int slot) const {
    return blocked[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(slot)] != 0;
  }
};

// Loop-prevention rule: for stage (a,k), neighbor j is blocked at i when
//   1) dD_dt(j) > dD_dt(i)  (ties also block directions currently at zero:
//      a new direction must point strictly downhill), or
//   2) an "improper" positive-fraction link is reachable from j within the
//      stage subgraph, where link (p,q) is improper when dD_dt(q) fails to
//      strictly decrease: dD_dt(q) >= dD_dt(p).
// Equality counts as improper, so after an update every positive direction
// either strictly descends in dD_dt or ends at a node none of whose
// downstream links ascend; a cycle would need the values to strictly
// decrease around it, which is impossible.
BlockedSets compute_blocked_sets(const Instance& inst, const Strategy& phi, const MarginalState& marg);

// Optional restriction of the search space (used by the path/offload-only
// baselines): allowed[a][k][i] lists permitted directions as a Row-shaped
// mask (cpu flag + per-slot flags); absent means everything is allowed.
struct DirectionMask {
  struct RowMask {
    bool cpu = true;
    std::vector<std::uint8_t> out;  // aligned with out_neighbors
  };
  std::vector<std::vector<std::vector<RowMask>>> rows;
  bool empty() const { return rows.empty(); }
};

struct GPParams {
  double alpha = 0.05;        // base stepsize
  bool scale_per_row = true;  // divide by the row's largest finite excess
  bool backtracking = true;   // halve the step while an iteration raises cost
  double tol = 1e-6;          // stop when the sufficiency residual drops below
  int max_iters = 20000;
  bool distributed = false;   // compute marginals via the message protocol
  double stall_cost_tol = 1e-9;  // secondary stop on per-iteration cost change
  int stall_window = 50;
};

struct StepReport {
  double mass_moved = 0.0;
  int rows_changed = 0;
  int frozen_rows = 0;  // rows whose every direction was blocked (kept as-is)
};

// Selects which moves one gp_step call performs. Two kinds of moves must
// happen outside cost-based backtracking (Unconditional), because acceptance
// by cost either cannot see them or would always veto them:
//   - idle rows (zero traffic here) moving mass changes no load at all;
//   - "forced" drains: a blocked direction whose marginal is below every
//     usable direction's. It is blocked purely to prevent loops, so emptying
//     it raises the cost at first order — but only while it keeps whole
//     upstream regions blocked. Halving it per iteration bounds the bump.
// Backtracked covers the rest: proportional sheds and the drains that
// already descend. All does everything at once (standalone use).
enum class StepParts { All, Unconditional, Backtracked };

// One projected descent update of every row (or only rows admitted by
// `updatable`): blocked directions are emptied, directions with positive
// excess e = delta - min_delta shed min(phi, step * e), and the freed mass is
// split evenly among the row's delta-minimizers. Rows keep their exact sums;
// entries at or below kEpsPhi are snapped to zero.
//
// When `flows` is given, two refinements use the traffic:
//   - idle rows (zero traffic) move all non-minimal mass to the minimizers at
//     once, since the move costs nothing;
//   - loaded rows cap each shed at the balance point step_scale * e / h
//     estimated from the local cost curvature, h = t * (m_s^2 c''_s +
//     n_shed * m_w^2 c''_w): the first-order excess vanishes right at that
//     move, so going further would raise the cost again. Without the cap the
//     per-row normalization keeps moving alpha-sized lumps of mass however
//     small the excess is, which near an optimum double-overshoots every row
//     and forces the backtracking scale (and with it the blocked-direction
//     drain) toward zero. Zero-curvature directions (linear costs) keep the
//     plain proportional shed.
StepReport gp_step(const Instance& inst, Strategy& phi, const MarginalState& marg, const BlockedSets& blocked,
                   const GPParams& params, double step_scale = 1.0, const DirectionMask* allowed = nullptr,
                   bool final_stage_only = false, const FlowState* flows = nullptr,
                   StepParts parts = StepParts::All);

// Runtime events applied between iterations.
struct Event {
  enum class Kind { RateChange, LinkRemove, LinkAdd, NodeAdd };
  Kind kind = Kind::RateChange;
  int iter = 0;  // applied before this iteration
  // RateChange
  AppId app = 0;
  NodeId node = 0;
  double rate = 0.0;
  // LinkRemove / LinkAdd
  NodeId from = 0;
  NodeId to = 0;
  CostFn link_cost;  // LinkAdd
  // NodeAdd: new node with these (bidirectional pairs given explicitly)
  std::vector<std::pair<NodeId, NodeId>> new_edges;
  std::vector<CostFn> new_edge_costs;
  CostFn node_cost;          // NodeAdd
  double node_comp_weight = 1.0;  // NodeAdd, used for every app/task

  static std::vector<Event> load(const std::string& path);
  static std::vector<Event> from_json_string(const std::string& text);
};

// Mutable optimizer state threaded through events.
struct GPState {
  Instance instance;
  Strategy strategy;
};

// Applies one event: updates the instance, remaps/repairs the strategy so it
// stays feasible and loop-free. Mass on a removed direction shifts to the
// row's remaining support; rows left empty (and all rows of an added node)
// are repointed along a zero-load route that keeps the stage acyclic.
void apply_event(GPState& state, const Event& ev);

enum class GPStatus { Converged, Stalled, MaxIters, Diverged };

struct IterRecord {
  int iter;
  double cost;
  double residual;
  bool loop_free;
  long messages;  // distributed mode only, else 0
};

struct GPResult {
  Strategy strategy;
  Instance final_instance;  // reflects applied events
  std::vector<IterRecord> trajectory;
  GPStatus status = GPStatus::MaxIters;
  double final_cost = kInf;
  double final_residual = kInf;
  int iterations = 0;
  RoundLog round_log;  // accumulated when distributed
  std::string status_name() const;
  std::string trajectory_csv() const;  // columns: iter,cost,residual,loop_free,messages
};

struct RunOptions {
  std::vector<Event> events;
  DirectionMask allowed;              // restrict directions (baselines)
  bool final_stage_only = false;      // update only each app's final-stage rows
  bool check_every_iteration = true;  // assert feasibility + loop-freedom per iteration
};

// Full optimizer loop: solve traffic, compute marginals (optionally via the
// message protocol), stop on the sufficiency residual, otherwise take one
// blocked-set projected step (with backtracking). Throws LoopError if an
// iteration ever produces a cyclic stage subgraph.
GPResult run_gp(const Instance& inst, const Strategy& initial, const GPParams& params, const RunOptions& opts = {});

// Residual of the sufficiency condition restricted to an allowed-direction
// mask and/or the final-stage rows (the target of masked runs); equals the
// global residual when unrestricted.
double masked_sufficiency_residual(const Instance& inst, const Strategy& phi, const MarginalState& marg,
                                   const DirectionMask* allowed, bool final_stage_only = false);

}  // namespace chainflow
