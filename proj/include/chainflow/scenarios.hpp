#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainflow/instance.hpp"

namespace chainflow {

enum class Topology {
  ConnectedER,   // Erdos-Renyi resampled until connected
  BalancedTree,  // complete binary tree
  Fog,           // fixed hierarchical edge list (19 nodes / 30 links)
  Abilene,       // fixed backbone edge list (11 / 14)
  Lhc,           // fixed grid-computing edge list (16 / 31)
  Geant,         // fixed backbone edge list (22 / 33)
  SmallWorld,    // ring + 2-hop chords + random long-range links
};

struct ScenarioConfig {
  Topology topology = Topology::ConnectedER;
  int nodes = 20;
  int links = 40;  // undirected; instantiated as two directed edges each
  int apps = 5;
  int sources_per_app = 3;
  int chain_len = 2;
  double packet_base = 10.0;  // packet_size[k] = max(0, base - step*k)
  double packet_step = 5.0;
  double packet0 = -1.0;  // when >= 0, overrides packet_size[0] only (hop sweep)
  double rate_lo = 0.5, rate_hi = 1.5;
  CostFn::Kind link_kind = CostFn::Kind::Queue;
  double link_mean = 10.0;  // capacity (queue) or slope (linear); sampled
  CostFn::Kind comp_kind = CostFn::Kind::Queue;
  double comp_mean = 12.0;  // in [0.5, 1.5] * mean per link/node
  double comp_weight = 1.0;  // every node capable by default
  double rate_scale = 1.0;   // sweep axis: multiplies every input rate
  std::uint64_t seed = 1;

  std::string topology_name() const;
};

// Named presets mirroring the benchmark table; "sw" uses queue costs on both
// resources and "sw-linear" linear ones.
ScenarioConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Deterministic generation: one seed fixes topology, capacities, app
// endpoints and rates (independent sub-streams per aspect, so e.g. changing
// rate_scale keeps the topology). Every topology is connected and each link
// is instantiated in both directions, so all endpoints are reachable.
Instance generate_scenario(const ScenarioConfig& config);

// Instances sharing the config's topology and seed, varying one axis.
enum class SweepAxis { RateScale, PacketBase };
std::vector<Instance> sweep_instances(const ScenarioConfig& config, SweepAxis axis,
                                      const std::vector<double>& values);

}  // namespace chainflow
