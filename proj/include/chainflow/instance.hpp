#pragma once

#include <string>
#include <vector>

#include "chainflow/app.hpp"
#include "chainflow/cost.hpp"
#include "chainflow/graph.hpp"

namespace chainflow {

// A complete problem instance: topology, congestion-dependent costs, and the
// set of service-chain applications.
struct Instance {
  NetworkGraph graph;
  CostModel cost;
  std::vector<Application> apps;

  int app_count() const { return static_cast<int>(apps.size()); }
  const Application& app(AppId a) const { return apps[static_cast<size_t>(a)]; }

  // Total number of (app, stage) pairs; the unit in message-count bounds.
  int stage_count() const {
    int n = 0;
    for (const auto& a : apps) n += a.stage_count();
    return n;
  }

  // Structural checks: sizes line up, rates nonnegative, packet sizes
  // nonnegative, destination ids valid. Throws ValidationError.
  void validate() const;

  std::string to_json_string(int indent = 2) const;
  static Instance from_json_string(const std::string& text);
  void save(const std::string& path) const;
  static Instance load(const std::string& path);
};

}  // namespace chainflow
