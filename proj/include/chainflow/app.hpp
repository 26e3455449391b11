#pragma once

#include <vector>

#include "chainflow/types.hpp"

namespace chainflow {

// A service-chain application: data packets injected at source nodes must
// pass through chain_len sequential tasks and the final results must reach
// the destination node. Stage k packets (k = 0..chain_len) are the output of
// the first k tasks; performing task k+1 converts one stage-k packet into one
// stage-k+1 packet at whichever node runs it.
struct Application {
  AppId id = 0;
  int chain_len = 1;
  NodeId destination = 0;

  // packet_size[k] = size of a stage-k packet, k = 0..chain_len.
  std::vector<double> packet_size;

  // input_rate[i] = exogenous stage-0 packet rate injected at node i.
  std::vector<double> input_rate;

  // comp_weight[k][i] = workload for node i to run task k+1 on one stage-k
  // packet, k = 0..chain_len-1. +inf marks a node that cannot run the task.
  std::vector<std::vector<double>> comp_weight;

  int stage_count() const { return chain_len + 1; }
  double rate(NodeId i) const { return input_rate[static_cast<size_t>(i)]; }
  double weight(int k, NodeId i) const { return comp_weight[static_cast<size_t>(k)][static_cast<size_t>(i)]; }
  bool can_compute(int k, NodeId i) const { return weight(k, i) < kInf; }
  double total_input_rate() const {
    double s = 0;
    for (double r : input_rate) s += r;
    return s;
  }
  std::vector<NodeId> sources() const {
    std::vector<NodeId> s;
    for (NodeId i = 0; i < static_cast<NodeId>(input_rate.size()); ++i)
      if (input_rate[static_cast<size_t>(i)] > 0) s.push_back(i);
    return s;
  }
};

}  // namespace chainflow
