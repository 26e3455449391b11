#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainflow {

using NodeId = int;
using EdgeId = int;
using AppId = int;

// +infinity doubles as the "unavailable" sentinel: incapable CPUs, saturated
// queues, directions outside the graph. It must propagate through cost and
// marginal arithmetic without ever turning into NaN.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Fractions at or below this threshold are treated as numerically zero when
// building the positive-fraction subgraph (loop checks, traffic sweeps).
inline constexpr double kEpsPhi = 1e-9;

// Tolerance for the per-row simplex constraint (fractions sum to 1 or 0).
inline constexpr double kEpsRowSum = 1e-12;

// Window within which competing marginals count as tied.
inline constexpr double kEpsTie = 1e-12;

// A stage is one hop of an application's pipeline: stage k packets are the
// output of task k (stage 0 = raw data, stage chain_len = final results).
struct Stage {
  AppId app = 0;
  int k = 0;
};

// Multiplies a rate by a marginal while honoring the infinity sentinel:
// an infinite marginal dominates even zero rate (structurally forbidden
// directions stay forbidden), a finite marginal times zero rate is zero.
inline double sentinel_mul(double rate, double marginal) {
  if (marginal == kInf) return kInf;
  return rate * marginal;
}

// Base for structured errors; `what()` stays human-readable, fields let
// callers map failures to exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Instance or strategy fails structural validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A stage's positive-fraction subgraph contains a cycle.
class LoopError : public Error {
 public:
  LoopError(AppId app, int k, std::vector<NodeId> cycle_nodes, const std::string& msg)
      : Error(msg), app(app), k(k), cycle(std::move(cycle_nodes)) {}
  AppId app;
  int k;
  std::vector<NodeId> cycle;
};

// No finite-cost operating point could be constructed (saturation).
class SaturationError : public Error {
 public:
  using Error::Error;
};

// An iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace chainflow
