#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "chainflow/scenarios.hpp"
#include "helpers.hpp"

using namespace chainflow;
using doctest::Approx;

TEST_CASE("the preset table pins sizes, workloads and cost kinds") {
  auto names = preset_names();
  REQUIRE(names.size() == 8);
  for (const char* want : {"connected-er", "balanced-tree", "fog", "abilene", "lhc", "geant", "sw", "sw-linear"})
    CHECK(std::find(names.begin(), names.end(), want) != names.end());

  ScenarioConfig ab = preset_config("abilene");
  CHECK(ab.topology == Topology::Abilene);
  CHECK(ab.nodes == 11);
  CHECK(ab.links == 14);
  CHECK(ab.apps == 3);
  CHECK(ab.sources_per_app == 3);
  CHECK(ab.chain_len == 2);
  CHECK(ab.packet_base == 10.0);
  CHECK(ab.packet_step == 5.0);
  CHECK(ab.link_kind == CostFn::Kind::Queue);
  CHECK(ab.link_mean == 15.0);
  CHECK(ab.comp_mean == 10.0);

  ScenarioConfig er = preset_config("connected-er");
  CHECK(er.nodes == 20);
  CHECK(er.links == 40);
  CHECK(er.apps == 5);

  ScenarioConfig swl = preset_config("sw-linear");
  CHECK(swl.topology == Topology::SmallWorld);
  CHECK(swl.nodes == 100);
  CHECK(swl.link_kind == CostFn::Kind::Linear);
  CHECK(swl.comp_kind == CostFn::Kind::Linear);
  CHECK(preset_config("sw").link_kind == CostFn::Kind::Queue);

  CHECK_THROWS_AS(preset_config("mystery"), ValidationError);
}

TEST_CASE("fixed topologies instantiate every listed link in both directions") {
  struct Expect {
    const char* preset;
    int nodes;
    int directed_edges;
  };
  for (Expect e : {Expect{"fog", 19, 60}, Expect{"abilene", 11, 28}, Expect{"lhc", 16, 62},
                   Expect{"geant", 22, 66}, Expect{"balanced-tree", 15, 28}}) {
    CAPTURE(e.preset);
    ScenarioConfig c = preset_config(e.preset);
    c.seed = 5;
    Instance inst = generate_scenario(c);
    CHECK(inst.graph.node_count() == e.nodes);
    CHECK(inst.graph.edge_count() == e.directed_edges);
    // Symmetric: the reverse of every edge exists.
    for (EdgeId id = 0; id < inst.graph.edge_count(); ++id) {
      const auto& ed = inst.graph.edge(id);
      CHECK(inst.graph.has_edge(ed.to, ed.from));
    }
    REQUIRE_NOTHROW(inst.validate());
    CHECK(inst.app_count() == c.apps);
    for (AppId a = 0; a < inst.app_count(); ++a) {
      CHECK(static_cast<int>(inst.app(a).sources().size()) == c.sources_per_app);
      CHECK(inst.app(a).packet_size == std::vector<double>{10.0, 5.0, 0.0});
    }
  }
}

TEST_CASE("random topologies honor the requested sizes") {
  ScenarioConfig er = preset_config("connected-er");
  er.seed = 9;
  Instance inst = generate_scenario(er);
  CHECK(inst.graph.node_count() == 20);
  CHECK(inst.graph.edge_count() == 80);  // 40 undirected links

  ScenarioConfig sw = preset_config("sw");
  sw.seed = 9;
  Instance sw_inst = generate_scenario(sw);
  CHECK(sw_inst.graph.node_count() == 100);
  CHECK(sw_inst.graph.edge_count() == 640);
  CHECK(sw_inst.app_count() == 30);
}

TEST_CASE("generation is a pure function of the config") {
  ScenarioConfig c = preset_config("connected-er");
  c.seed = 31;
  std::string first = generate_scenario(c).to_json_string();
  std::string second = generate_scenario(c).to_json_string();
  CHECK(first == second);

  c.seed = 32;
  CHECK(generate_scenario(c).to_json_string() != first);
}

TEST_CASE("scaling the rates leaves everything else untouched") {
  ScenarioConfig c = preset_config("abilene");
  c.seed = 7;
  std::vector<Instance> insts = sweep_instances(c, SweepAxis::RateScale, {1.0, 1.3});
  REQUIRE(insts.size() == 2);
  const Instance& base = insts[0];
  const Instance& scaled = insts[1];
  REQUIRE(base.graph.edge_count() == scaled.graph.edge_count());
  for (EdgeId e = 0; e < base.graph.edge_count(); ++e) {
    CHECK(base.graph.edge(e).from == scaled.graph.edge(e).from);
    CHECK(base.graph.edge(e).to == scaled.graph.edge(e).to);
    CHECK(base.cost.link[static_cast<size_t>(e)].param == scaled.cost.link[static_cast<size_t>(e)].param);
  }
  for (AppId a = 0; a < base.app_count(); ++a) {
    CHECK(base.app(a).destination == scaled.app(a).destination);
    for (NodeId i = 0; i < base.graph.node_count(); ++i)
      CHECK(scaled.app(a).input_rate[static_cast<size_t>(i)] ==
            Approx(1.3 * base.app(a).input_rate[static_cast<size_t>(i)]).epsilon(1e-12));
  }
}

TEST_CASE("the stage-0 packet override only touches the first entry") {
  ScenarioConfig c = preset_config("abilene");
  c.seed = 7;
  c.packet0 = 2.5;
  Instance inst = generate_scenario(c);
  for (AppId a = 0; a < inst.app_count(); ++a)
    CHECK(inst.app(a).packet_size == std::vector<double>{2.5, 5.0, 0.0});

  std::vector<Instance> insts = sweep_instances(preset_config("abilene"), SweepAxis::PacketBase, {2.5, 20.0});
  REQUIRE(insts.size() == 2);
  CHECK(insts[0].app(0).packet_size == std::vector<double>{2.5, 5.0, 0.0});
  CHECK(insts[1].app(0).packet_size == std::vector<double>{20.0, 5.0, 0.0});
  // Rates and capacities are shared across the sweep.
  CHECK(insts[0].app(0).input_rate == insts[1].app(0).input_rate);
}

TEST_CASE("sampled parameters stay within their stated ranges") {
  ScenarioConfig c = preset_config("connected-er");
  c.seed = 13;
  Instance inst = generate_scenario(c);
  for (const CostFn& fn : inst.cost.link) {
    CHECK(fn.kind == CostFn::Kind::Queue);
    CHECK(fn.param >= 0.5 * c.link_mean - 1e-12);
    CHECK(fn.param <= 1.5 * c.link_mean + 1e-12);
  }
  for (const CostFn& fn : inst.cost.node) {
    CHECK(fn.param >= 0.5 * c.comp_mean - 1e-12);
    CHECK(fn.param <= 1.5 * c.comp_mean + 1e-12);
  }
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    CHECK(app.chain_len == 2);
    for (NodeId s : app.sources()) {
      CHECK(app.input_rate[static_cast<size_t>(s)] >= 0.5 - 1e-12);
      CHECK(app.input_rate[static_cast<size_t>(s)] <= 1.5 + 1e-12);
      CHECK(s != app.destination);
    }
    for (int k = 0; k < app.chain_len; ++k)
      for (NodeId i = 0; i < inst.graph.node_count(); ++i) CHECK(app.weight(k, i) == 1.0);
  }
}

TEST_CASE("topology names round-trip") {
  for (const std::string& name : preset_names()) {
    ScenarioConfig c = preset_config(name);
    if (name == "sw" || name == "sw-linear")
      CHECK(c.topology_name() == "small-world");
    else
      CHECK(c.topology_name() == name);
  }
}
