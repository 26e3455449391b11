#pragma once

#include <string>
#include <vector>

#include "chainflow/types.hpp"

namespace chainflow {

// Convex nondecreasing cost of an aggregate load, zero at zero load.
//   linear: cost = slope * x
//   queue:  cost = x / (mu - x) for x < mu, +inf at or beyond capacity
// The queue form is the expected occupancy of an M/M/1 server with service
// rate mu; by Little's law total occupancy is proportional to average delay.
struct CostFn {
  enum class Kind { Linear, Queue };

  Kind kind = Kind::Linear;
  double param = 1.0;  // slope for Linear, capacity mu for Queue

  static CostFn linear(double slope) { return {Kind::Linear, slope}; }
  static CostFn queue(double mu) { return {Kind::Queue, mu}; }

  double evaluate(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  // Load at which the cost becomes infinite (+inf for linear).
  double capacity() const { return kind == Kind::Queue ? param : kInf; }

  std::string kind_name() const { return kind == Kind::Linear ? "linear" : "queue"; }
};

// Per-link and per-node cost functions for one instance; indices follow the
// graph's edge ids and node ids.
struct CostModel {
  std::vector<CostFn> link;  // by EdgeId
  std::vector<CostFn> node;  // by NodeId
};

}  // namespace chainflow
