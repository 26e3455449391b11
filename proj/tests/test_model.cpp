#include <doctest.h>

#include <cmath>

#include "chainflow/flow.hpp"
#include "chainflow/format.hpp"
#include "helpers.hpp"

using namespace chainflow;
using doctest::Approx;

TEST_CASE("graph keeps out-neighbor slots sorted and stable") {
  NetworkGraph g(4, {{0, 3}, {0, 1}, {1, 2}, {2, 0}});
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 4);
  // Slots sort by neighbor id regardless of edge insertion order.
  REQUIRE(g.out_neighbors(0) == std::vector<NodeId>{1, 3});
  CHECK(g.out_slot(0, 1) == 0);
  CHECK(g.out_slot(0, 3) == 1);
  CHECK(g.out_slot(0, 2) == -1);
  CHECK(g.edge_between(0, 3) == 0);  // edge ids follow insertion order
  CHECK(g.edge_between(0, 1) == 1);
  CHECK(g.edge_between(1, 0) == -1);
  CHECK(g.in_edges(0).size() == 1);
}

TEST_CASE("graph mutations reassign ids consistently") {
  NetworkGraph g(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK_THROWS_AS(g.add_edge(0, 1), ValidationError);  // duplicate
  g.remove_edge(1, 2);
  CHECK(g.edge_count() == 2);
  CHECK(g.edge_between(2, 0) == 1);  // ids shift down after removal
  NodeId v = g.add_node();
  CHECK(v == 3);
  g.add_edge(3, 0);
  CHECK(g.out_neighbors(3) == std::vector<NodeId>{0});
  CHECK(g.to_dot().find("->") != std::string::npos);
}

TEST_CASE("queueing cost matches the waiting-packet formula") {
  CostFn q = CostFn::queue(10.0);
  CHECK(q.evaluate(0.0) == 0.0);
  CHECK(q.evaluate(5.0) == Approx(1.0));            // 5 / (10 - 5)
  CHECK(q.evaluate(8.0) == Approx(4.0));            // 8 / 2
  CHECK(q.derivative(0.0) == Approx(0.1));          // mu / mu^2
  CHECK(q.derivative(5.0) == Approx(10.0 / 25.0));  // mu / (mu - x)^2
  CHECK(q.evaluate(10.0) == kInf);
  CHECK(q.evaluate(11.0) == kInf);
  CHECK(q.derivative(10.0) == kInf);
  CHECK(q.capacity() == 10.0);
}

TEST_CASE("linear cost is a pure slope") {
  CostFn l = CostFn::linear(2.5);
  CHECK(l.evaluate(0.0) == 0.0);
  CHECK(l.evaluate(4.0) == Approx(10.0));
  CHECK(l.derivative(100.0) == 2.5);
  CHECK(l.capacity() == kInf);
}

TEST_CASE("cost derivatives are nonnegative and nondecreasing") {
  for (CostFn c : {CostFn::queue(7.0), CostFn::linear(0.3)}) {
    double prev = -1.0;
    for (double x = 0.0; x < 6.9; x += 0.5) {
      double d = c.derivative(x);
      CHECK(d >= 0.0);
      CHECK(d >= prev);
      prev = d;
    }
  }
}

TEST_CASE("instance json round-trips exactly") {
  Instance inst = cft::diamond_instance();
  std::string text = inst.to_json_string();
  Instance back = Instance::from_json_string(text);
  CHECK(back.to_json_string() == text);
  CHECK(back.graph.edge_count() == inst.graph.edge_count());
  CHECK(back.app(0).comp_weight[0][0] == kInf);  // sentinel survives the trip
  CHECK(back.app(0).input_rate[0] == inst.app(0).input_rate[0]);
}

TEST_CASE("instance validation rejects malformed inputs") {
  Instance inst = cft::line_instance();
  Instance bad = inst;
  bad.cost.link.pop_back();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = inst;
  bad.apps[0].destination = 9;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = inst;
  bad.apps[0].packet_size = {1.0};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = inst;
  bad.apps[0].input_rate[0] = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = inst;
  bad.apps[0].comp_weight[0][1] = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("strategy json round-trips and preserves fractions") {
  Instance inst = cft::line_instance();
  Strategy phi = cft::line_strategy(inst, 0.25);
  std::string text = phi.to_json_string(inst);
  Strategy back = Strategy::from_json_string(inst, text);
  CHECK(back.row(0, 0, 0).cpu == 0.25);
  CHECK(back.toward(inst, 0, 0, 0, 1) == 0.75);
  CHECK(back.to_json_string(inst) == text);
}

TEST_CASE("validate_strategy flags sum, cpu, and loop violations") {
  Instance inst = cft::line_instance();
  Strategy phi = cft::line_strategy(inst, 0.5);
  CHECK(validate_strategy(inst, phi).ok());

  SUBCASE("row sum off by more than the tolerance") {
    phi.row(0, 0, 0).cpu = 0.4;  // row now sums to 0.9
    auto rep = validate_strategy(inst, phi);
    REQUIRE(rep.simplex.size() == 1);
    CHECK(rep.simplex[0].node == 0);
    CHECK(rep.simplex[0].row_sum == Approx(0.9));
    CHECK_FALSE(rep.ok());
  }
  SUBCASE("cpu share on the final stage") {
    phi.row(0, 1, 0).cpu = 0.5;
    phi.set_toward(inst, 0, 1, 0, 1, 0.5);
    auto rep = validate_strategy(inst, phi);
    REQUIRE(rep.cpu.size() == 1);
    CHECK(rep.cpu[0].reason == "final-stage");
  }
  SUBCASE("cpu share on an incapable node") {
    Instance restricted = inst;
    restricted.apps[0].comp_weight[0][0] = kInf;
    auto rep = validate_strategy(restricted, phi);
    REQUIRE(rep.cpu.size() == 1);
    CHECK(rep.cpu[0].reason == "incapable");
  }
  SUBCASE("a two-node forwarding cycle is reported with its nodes") {
    Instance ring;
    ring.graph = NetworkGraph(3, {{0, 1}, {1, 0}, {1, 2}});
    ring.cost.link = {CostFn::linear(1), CostFn::linear(1), CostFn::linear(1)};
    ring.cost.node = {CostFn::linear(1), CostFn::linear(1), CostFn::linear(1)};
    Application app;
    app.chain_len = 1;
    app.destination = 2;
    app.packet_size = {1.0, 0.0};
    app.input_rate = {1.0, 0.0, 0.0};
    app.comp_weight = {{1.0, 1.0, 1.0}};
    ring.apps = {app};
    ring.validate();
    Strategy loopy(ring);
    loopy.set_toward(ring, 0, 0, 0, 1, 1.0);
    loopy.set_toward(ring, 0, 0, 1, 0, 1.0);
    loopy.row(0, 0, 2).cpu = 1.0;
    loopy.set_toward(ring, 0, 1, 0, 1, 1.0);
    loopy.set_toward(ring, 0, 1, 1, 2, 1.0);
    auto rep = validate_strategy(ring, loopy);
    REQUIRE(rep.loops.size() == 1);
    CHECK(rep.loops[0].k == 0);
    CHECK(rep.loops[0].cycle.size() == 2);
    CHECK_THROWS_AS(stage_topological_order(ring, loopy, 0, 0), LoopError);
    CHECK_THROWS_AS(solve_traffic(ring, loopy), LoopError);
  }
}

TEST_CASE("traffic recursion matches the hand-solved line network") {
  Instance inst = cft::line_instance();  // r=2, L=[4,1]
  double q = 0.25;
  Strategy phi = cft::line_strategy(inst, q);
  FlowState fl = solve_traffic(inst, phi);

  CHECK(fl.t[0][0][0] == Approx(2.0));
  CHECK(fl.t[0][0][1] == Approx(2.0 * (1 - q)));
  CHECK(fl.g[0][0][0] == Approx(2.0 * q));
  CHECK(fl.g[0][0][1] == Approx(2.0 * (1 - q)));
  // Stage 1 is fed by stage-0 computation; everything drains to node 2.
  CHECK(fl.t[0][1][0] == Approx(2.0 * q));
  CHECK(fl.t[0][1][1] == Approx(2.0));
  CHECK(fl.t[0][1][2] == Approx(2.0));
  // Aggregate link loads weight each stage by its packet size.
  EdgeId e01 = inst.graph.edge_between(0, 1);
  EdgeId e12 = inst.graph.edge_between(1, 2);
  CHECK(fl.F[e01] == Approx(4.0 * 2.0 * (1 - q) + 1.0 * 2.0 * q));
  CHECK(fl.F[e12] == Approx(1.0 * 2.0));
  CHECK(fl.G[0] == Approx(2.0 * q));
  CHECK(fl.G[1] == Approx(2.0 * (1 - q)));
  // Linear costs give the closed form D = 14 - 2q.
  CHECK(total_cost(inst, fl) == Approx(14.0 - 2.0 * q));
}

TEST_CASE("zero input produces zero traffic everywhere") {
  Instance inst = cft::line_instance(0.0);
  Strategy phi = cft::line_strategy(inst, 0.5);
  FlowState fl = solve_traffic(inst, phi);
  for (int k = 0; k <= 1; ++k)
    for (NodeId i = 0; i < 3; ++i) CHECK(fl.t[0][k][i] == 0.0);
  CHECK(total_cost(inst, fl) == 0.0);
}

TEST_CASE("a zero-size packet stage adds no link load") {
  Instance inst = cft::line_instance(2.0, 4.0, 0.0);  // result packets are free
  Strategy phi = cft::line_strategy(inst, 0.0);
  FlowState fl = solve_traffic(inst, phi);
  EdgeId e12 = inst.graph.edge_between(1, 2);
  CHECK(fl.f[0][1][e12] == Approx(2.0));  // packets still flow
  CHECK(fl.F[e12] == 0.0);                // but carry no bits
}

TEST_CASE("cost is infinite at or beyond a queue capacity") {
  Instance inst = cft::line_instance();
  inst.cost.link[0] = CostFn::queue(7.9);  // F(e01) = 8 at q=0
  Strategy phi = cft::line_strategy(inst, 0.0);
  CHECK(total_cost(inst, phi) == kInf);
  inst.cost.link[0] = CostFn::queue(8.1);
  CHECK(total_cost(inst, phi) < kInf);
}

TEST_CASE("shortest-representation formatting round-trips doubles") {
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(0.1) == "0.1");
  CHECK(fmt_double(kInf) == "inf");
  CHECK(fmt_double(-kInf) == "-inf");
  double v = 3.606519774153758;
  CHECK(std::stod(fmt_double(v)) == v);
}
