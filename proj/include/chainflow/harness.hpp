#pragma once

#include <string>
#include <vector>

#include "chainflow/baselines.hpp"
#include "chainflow/scenarios.hpp"

namespace chainflow {

struct MethodOutcome {
  std::string method;
  double cost = kInf;
  double normalized = kInf;  // cost / worst finite cost among the methods
  bool feasible = false;
  bool converged = false;
  double runtime_sec = 0.0;
  std::string error;  // structured failure note, empty on success
};

// Runs the named methods ("gp", "spoc", "lcof", "lpr-sc") on one instance.
// Per-method failures are recorded, not fatal. When `enforce_ordering` is
// set and the descent method converged, a cost above any feasible baseline
// by more than 0.1% throws (it indicates a broken optimizer, not a result).
std::vector<MethodOutcome> compare_methods(const Instance& inst, const std::vector<std::string>& methods,
                                           const GPParams& params, bool enforce_ordering = false);

std::string outcomes_to_csv(const std::vector<MethodOutcome>& outcomes);
std::string outcomes_to_json(const std::vector<MethodOutcome>& outcomes, int indent = 2);

// Cost-vs-rate-scale sweep; one row per (scale, method).
struct SweepRow {
  double axis_value;
  std::string method;
  double cost;
  bool feasible;
};
std::vector<SweepRow> rate_sweep_experiment(const ScenarioConfig& config, const std::vector<double>& scales,
                                            const std::vector<std::string>& methods, const GPParams& params);
std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& axis_name);

// Average hop counts of the converged operating point as the stage-0 packet
// size varies. Hops of stage s = total stage-s link packet rate divided by
// total stage-s injection rate (flow-weighted path length).
struct HopRow {
  double packet_base;
  double data_hops;    // stage 0
  double result_hops;  // stages >= 1, flow-weighted
  double cost;
};
std::vector<HopRow> hopcount_experiment(const ScenarioConfig& config, const std::vector<double>& packet_bases,
                                        const GPParams& params);
std::string hops_to_csv(const std::vector<HopRow>& rows);

// Hop metric of one solved operating point (helper shared with tests).
void hop_metrics(const Instance& inst, const FlowState& flows, double* data_hops, double* result_hops);

}  // namespace chainflow
