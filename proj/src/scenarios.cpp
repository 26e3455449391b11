#include "chainflow/scenarios.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <utility>

#include "chainflow/rng.hpp"

namespace chainflow {

namespace {

using PairList = std::vector<std::pair<NodeId, NodeId>>;

// Fixed hierarchical edge list: one cloud node (0), two core nodes (1-2),
// four aggregation nodes (3-6), twelve devices (7-18); devices attach to an
// aggregation node in groups of three, plus a few device-to-device links.
PairList fog_edges() {
  return {{0, 1},  {0, 2},  {1, 2},  {1, 3},   {1, 4},   {2, 5},   {2, 6},   {3, 4},   {5, 6},   {4, 5},
          {3, 7},  {3, 8},  {3, 9},  {4, 10},  {4, 11},  {4, 12},  {5, 13},  {5, 14},  {5, 15},  {6, 16},
          {6, 17}, {6, 18}, {7, 8},  {8, 9},   {10, 11}, {11, 12}, {13, 14}, {14, 15}, {16, 17}, {17, 18}};
}

// US research backbone, 11 points of presence.
PairList abilene_edges() {
  return {{0, 1}, {0, 3}, {1, 2}, {1, 3}, {2, 5}, {3, 4}, {4, 5}, {4, 7}, {5, 8}, {6, 7}, {6, 10}, {7, 8}, {8, 9}, {9, 10}};
}

// Tiered grid-computing topology: one central site (0), four tier-1 sites
// (1-4, fully meshed and homed to the center), eleven tier-2 sites (5-15)
// each homed to one or two tier-1 sites.
PairList lhc_edges() {
  return {{0, 1}, {0, 2}, {0, 3},  {0, 4},  {1, 2},  {1, 3},  {1, 4},  {2, 3},  {2, 4},  {3, 4},  {5, 1},
          {5, 2}, {6, 1}, {6, 3},  {7, 1},  {7, 4},  {8, 2},  {8, 3},  {9, 2},  {9, 4},  {10, 3}, {10, 4},
          {11, 1}, {11, 2}, {12, 2}, {12, 3}, {13, 3}, {13, 4}, {14, 1}, {14, 4}, {15, 2}};
}

// Continental backbone approximation: a 22-node ring with 11 shortcut links.
PairList geant_edges() {
  PairList e;
  for (NodeId i = 0; i < 22; ++i) e.emplace_back(i, (i + 1) % 22);
  PairList chords = {{0, 11}, {2, 13}, {4, 15}, {6, 17}, {8, 19}, {10, 21}, {1, 6}, {3, 9}, {12, 18}, {14, 20}, {5, 16}};
  e.insert(e.end(), chords.begin(), chords.end());
  return e;
}

bool connected_undirected(int n, const PairList& edges) {
  std::vector<std::vector<NodeId>> adj(static_cast<size_t>(n));
  for (auto [u, v] : edges) {
    adj[static_cast<size_t>(u)].push_back(v);
    adj[static_cast<size_t>(v)].push_back(u);
  }
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId v : adj[static_cast<size_t>(u)])
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = 1;
        ++count;
        q.push(v);
      }
  }
  return count == n;
}

PairList er_edges(int n, int links, Rng& rng) {
  PairList all;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) all.emplace_back(i, j);
  if (links > static_cast<int>(all.size()))
    throw ValidationError("requested more links than node pairs");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    // Partial Fisher-Yates: draw `links` distinct pairs.
    for (int x = 0; x < links; ++x) {
      size_t y = static_cast<size_t>(x) + static_cast<size_t>(rng.below(all.size() - static_cast<size_t>(x)));
      std::swap(all[static_cast<size_t>(x)], all[y]);
    }
    PairList chosen(all.begin(), all.begin() + links);
    if (connected_undirected(n, chosen)) return chosen;
  }
  throw ValidationError("could not sample a connected random graph in 1000 attempts");
}

PairList tree_edges(int n) {
  PairList e;
  for (NodeId i = 1; i < n; ++i) e.emplace_back((i - 1) / 2, i);
  return e;
}

PairList small_world_edges(int n, int links, Rng& rng) {
  PairList e;
  std::set<std::pair<NodeId, NodeId>> used;
  auto push = [&](NodeId u, NodeId v) {
    if (u == v) return false;
    auto key = std::minmax(u, v);
    if (!used.insert({key.first, key.second}).second) return false;
    e.emplace_back(u, v);
    return true;
  };
  for (NodeId i = 0; i < n && static_cast<int>(e.size()) < links; ++i) push(i, (i + 1) % n);
  for (NodeId i = 0; i < n && static_cast<int>(e.size()) < links; ++i) push(i, (i + 2) % n);
  int guard = 0;
  while (static_cast<int>(e.size()) < links) {
    NodeId u = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
    NodeId v = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
    push(u, v);
    if (++guard > 100000) throw ValidationError("could not place the requested number of long-range links");
  }
  return e;
}

}  // namespace

std::string ScenarioConfig::topology_name() const {
  switch (topology) {
    case Topology::ConnectedER: return "connected-er";
    case Topology::BalancedTree: return "balanced-tree";
    case Topology::Fog: return "fog";
    case Topology::Abilene: return "abilene";
    case Topology::Lhc: return "lhc";
    case Topology::Geant: return "geant";
    case Topology::SmallWorld: return "small-world";
  }
  return "unknown";
}

std::vector<std::string> preset_names() {
  return {"connected-er", "balanced-tree", "fog", "abilene", "lhc", "geant", "sw", "sw-linear"};
}

ScenarioConfig preset_config(const std::string& name) {
  ScenarioConfig c;
  if (name == "connected-er") {
    c.topology = Topology::ConnectedER;
    c.nodes = 20; c.links = 40; c.apps = 5; c.sources_per_app = 3;
    c.link_mean = 10; c.comp_mean = 12;
  } else if (name == "balanced-tree") {
    c.topology = Topology::BalancedTree;
    c.nodes = 15; c.links = 14; c.apps = 5; c.sources_per_app = 3;
    c.link_mean = 20; c.comp_mean = 15;
  } else if (name == "fog") {
    c.topology = Topology::Fog;
    c.nodes = 19; c.links = 30; c.apps = 5; c.sources_per_app = 3;
    c.link_mean = 20; c.comp_mean = 17;
  } else if (name == "abilene") {
    c.topology = Topology::Abilene;
    c.nodes = 11; c.links = 14; c.apps = 3; c.sources_per_app = 3;
    c.link_mean = 15; c.comp_mean = 10;
  } else if (name == "lhc") {
    c.topology = Topology::Lhc;
    c.nodes = 16; c.links = 31; c.apps = 8; c.sources_per_app = 3;
    c.link_mean = 15; c.comp_mean = 15;
  } else if (name == "geant") {
    c.topology = Topology::Geant;
    c.nodes = 22; c.links = 33; c.apps = 10; c.sources_per_app = 5;
    c.link_mean = 20; c.comp_mean = 20;
  } else if (name == "sw" || name == "sw-linear") {
    c.topology = Topology::SmallWorld;
    c.nodes = 100; c.links = 320; c.apps = 30; c.sources_per_app = 8;
    c.link_mean = 20; c.comp_mean = 20;
    if (name == "sw-linear") {
      c.link_kind = CostFn::Kind::Linear;
      c.comp_kind = CostFn::Kind::Linear;
    }
  } else {
    std::string all;
    for (const auto& p : preset_names()) all += (all.empty() ? "" : ", ") + p;
    throw ValidationError("unknown preset '" + name + "' (available: " + all + ")");
  }
  return c;
}

Instance generate_scenario(const ScenarioConfig& config) {
  if (config.nodes < 2) throw ValidationError("need at least two nodes");
  Rng root(config.seed);
  Rng topo_rng = root.fork(1);
  Rng link_rng = root.fork(2);
  Rng node_rng = root.fork(3);
  Rng app_rng = root.fork(4);

  PairList undirected;
  int n = config.nodes;
  switch (config.topology) {
    case Topology::ConnectedER: undirected = er_edges(n, config.links, topo_rng); break;
    case Topology::BalancedTree: undirected = tree_edges(n); break;
    case Topology::Fog: undirected = fog_edges(); n = 19; break;
    case Topology::Abilene: undirected = abilene_edges(); n = 11; break;
    case Topology::Lhc: undirected = lhc_edges(); n = 16; break;
    case Topology::Geant: undirected = geant_edges(); n = 22; break;
    case Topology::SmallWorld: undirected = small_world_edges(n, config.links, topo_rng); break;
  }

  Instance inst;
  PairList directed;
  for (auto [u, v] : undirected) {
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  inst.graph = NetworkGraph(n, directed);

  for (size_t x = 0; x < undirected.size(); ++x) {
    double p = link_rng.uniform(0.5 * config.link_mean, 1.5 * config.link_mean);
    CostFn c = config.link_kind == CostFn::Kind::Queue ? CostFn::queue(p) : CostFn::linear(p);
    inst.cost.link.push_back(c);  // same figure for both directions
    inst.cost.link.push_back(c);
  }
  for (NodeId i = 0; i < n; ++i) {
    double p = node_rng.uniform(0.5 * config.comp_mean, 1.5 * config.comp_mean);
    inst.cost.node.push_back(config.comp_kind == CostFn::Kind::Queue ? CostFn::queue(p) : CostFn::linear(p));
  }

  for (int a = 0; a < config.apps; ++a) {
    Application app;
    app.id = a;
    app.chain_len = config.chain_len;
    for (int k = 0; k <= config.chain_len; ++k)
      app.packet_size.push_back(std::max(0.0, config.packet_base - config.packet_step * k));
    if (config.packet0 >= 0) app.packet_size[0] = config.packet0;
    app.input_rate.assign(static_cast<size_t>(n), 0.0);
    app.comp_weight.assign(static_cast<size_t>(config.chain_len),
                           std::vector<double>(static_cast<size_t>(n), config.comp_weight));

    app.destination = static_cast<NodeId>(app_rng.below(static_cast<std::uint64_t>(n)));
    int placed = 0;
    int guard = 0;
    while (placed < config.sources_per_app) {
      NodeId s = static_cast<NodeId>(app_rng.below(static_cast<std::uint64_t>(n)));
      if (s == app.destination || app.input_rate[static_cast<size_t>(s)] > 0) {
        if (++guard > 10000) throw ValidationError("could not place distinct sources");
        continue;
      }
      app.input_rate[static_cast<size_t>(s)] = app_rng.uniform(config.rate_lo, config.rate_hi) * config.rate_scale;
      ++placed;
    }
    inst.apps.push_back(std::move(app));
  }

  inst.validate();
  return inst;
}

std::vector<Instance> sweep_instances(const ScenarioConfig& config, SweepAxis axis, const std::vector<double>& values) {
  std::vector<Instance> out;
  for (double v : values) {
    ScenarioConfig c = config;
    if (axis == SweepAxis::RateScale)
      c.rate_scale = v;
    else
      c.packet0 = v;
    out.push_back(generate_scenario(c));
  }
  return out;
}

}  // namespace chainflow
