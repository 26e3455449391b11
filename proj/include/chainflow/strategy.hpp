#pragma once

#include <string>
#include <vector>

#include "chainflow/instance.hpp"
#include "chainflow/types.hpp"

namespace chainflow {

// One routing/offloading row: how node i splits its stage-(a,k) traffic
// between its CPU (advancing the packet to stage k+1) and its out-neighbors.
// `out` is aligned with graph.out_neighbors(i).
struct Row {
  double cpu = 0.0;
  std::vector<double> out;

  double sum() const {
    double s = cpu;
    for (double v : out) s += v;
    return s;
  }
};

// Fractional forwarding/offloading decisions for every (node, app, stage).
// Feasibility: each row sums to 1, except the destination's final-stage row
// which sums to 0 (results exit there), and the CPU share of any final-stage
// row is 0 (there is no further task to run).
class Strategy {
 public:
  Strategy() = default;
  explicit Strategy(const Instance& inst);

  Row& row(AppId a, int k, NodeId i) { return rows_[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)]; }
  const Row& row(AppId a, int k, NodeId i) const {
    return rows_[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)];
  }

  // Fraction sent from i toward neighbor j (0 when (i,j) is not an edge).
  double toward(const Instance& inst, AppId a, int k, NodeId i, NodeId j) const;
  void set_toward(const Instance& inst, AppId a, int k, NodeId i, NodeId j, double v);

  // Zero every entry at or below kEpsPhi and compensate so the row sum is
  // exactly preserved (mass goes to the row's largest entry). Keeps the
  // positive-fraction subgraph identical to the support.
  void snap_row(AppId a, int k, NodeId i);

  // Rebuild row slots after a graph mutation, matching entries by neighbor
  // id; fractions on removed edges are dropped (not renormalized here).
  void remap(const Instance& old_inst, const Instance& new_inst);

  std::string to_json_string(const Instance& inst, int indent = 2) const;
  static Strategy from_json_string(const Instance& inst, const std::string& text);
  void save(const Instance& inst, const std::string& path) const;
  static Strategy load(const Instance& inst, const std::string& path);

 private:
  // rows_[app][k][node]
  std::vector<std::vector<std::vector<Row>>> rows_;
};

}  // namespace chainflow
