#include <doctest.h>

#include <cmath>

#include "chainflow/baselines.hpp"
#include "chainflow/init.hpp"
#include "helpers.hpp"

using namespace chainflow;
using doctest::Approx;

namespace {

int positive_out_slots(const Row& r) {
  int n = 0;
  for (double v : r.out)
    if (v > kEpsPhi) ++n;
  return n;
}

GPParams quick_params() {
  GPParams p;
  p.tol = 1e-7;
  p.max_iters = 20000;
  return p;
}

}  // namespace

TEST_CASE("path-restricted offloading stays on the shortest-path tree") {
  Instance inst = cft::small_coupled_instance(81);
  BaselineResult res = spoc(inst, quick_params());
  CHECK(res.method == "spoc");
  CHECK(res.feasible);
  CHECK(res.converged);
  CHECK(res.cost < kInf);
  // Each row may split between its CPU and one tree next hop, never more.
  for (AppId a = 0; a < inst.app_count(); ++a)
    for (int k = 0; k <= inst.app(a).chain_len; ++k)
      for (NodeId i = 0; i < inst.graph.node_count(); ++i)
        CHECK(positive_out_slots(res.strategy.row(a, k, i)) <= 1);
  CHECK(validate_strategy(inst, res.strategy).ok());

  // Its cost can never beat the unrestricted search by more than slack.
  GPResult full = run_gp(inst, initial_strategy(inst), quick_params());
  REQUIRE(full.status == GPStatus::Converged);
  CHECK(full.final_cost <= res.cost * 1.001);
}

TEST_CASE("path-restricted offloading finds the line-network optimum") {
  Instance inst = cft::line_instance();
  BaselineResult res = spoc(inst, quick_params());
  REQUIRE(res.feasible);
  CHECK(res.cost == Approx(12.0).epsilon(1e-6));
}

TEST_CASE("compute-at-source runs the chain locally and only routes results") {
  Instance inst = cft::line_instance();
  BaselineResult res = lcof(inst, quick_params());
  CHECK(res.method == "lcof");
  REQUIRE(res.feasible);
  CHECK(res.strategy.row(0, 0, 0).cpu == 1.0);  // the source computes
  CHECK(res.cost == Approx(12.0).epsilon(1e-6));  // optimal here by luck
  CHECK(validate_strategy(inst, res.strategy).ok());
}

TEST_CASE("compute-at-source rejects a source that cannot run a task") {
  Instance inst = cft::diamond_instance();  // data enters at node 0, w(0) = inf
  CHECK_THROWS_AS(lcof(inst, quick_params()), ValidationError);
}

TEST_CASE("compute-at-source is dominated when the source is congested") {
  // Tight CPU at the only source, roomy CPUs elsewhere: offloading wins.
  Instance inst;
  inst.graph = NetworkGraph(3, {{0, 1}, {1, 2}});
  inst.cost.link = {CostFn::queue(50), CostFn::queue(50)};
  inst.cost.node = {CostFn::queue(1.25), CostFn::queue(50), CostFn::queue(50)};
  Application app;
  app.chain_len = 1;
  app.destination = 2;
  app.packet_size = {2.0, 1.0};
  app.input_rate = {1.0, 0.0, 0.0};
  app.comp_weight = {{1.0, 1.0, 1.0}};
  inst.apps = {app};
  inst.validate();

  BaselineResult local = lcof(inst, quick_params());
  GPResult full = run_gp(inst, initial_strategy(inst), quick_params());
  REQUIRE(local.feasible);
  REQUIRE(full.status == GPStatus::Converged);
  CHECK(full.final_cost < local.cost * 0.9);  // offloading helps by a margin
}

TEST_CASE("congestion-blind routing uses one unsplit path per row") {
  Instance inst = cft::small_coupled_instance(82);
  BaselineResult res = lpr_sc(inst);
  CHECK(res.method == "lpr-sc");
  CHECK(res.converged);  // the relaxed problem is solved exactly by construction
  REQUIRE(res.feasible);
  for (AppId a = 0; a < inst.app_count(); ++a)
    for (int k = 0; k <= inst.app(a).chain_len; ++k)
      for (NodeId i = 0; i < inst.graph.node_count(); ++i) {
        const Row& r = res.strategy.row(a, k, i);
        int pos = positive_out_slots(r) + (r.cpu > kEpsPhi ? 1 : 0);
        CHECK(pos <= 1);
        if (pos == 1) CHECK(r.sum() == 1.0);
      }
  CHECK(validate_strategy(inst, res.strategy).ok());

  GPResult full = run_gp(inst, initial_strategy(inst), quick_params());
  REQUIRE(full.status == GPStatus::Converged);
  CHECK(full.final_cost <= res.cost * 1.001);
}

TEST_CASE("congestion-blind routing reports saturation instead of hiding it") {
  // Any single path must push load 1 through a queue of capacity 0.5.
  Instance inst;
  inst.graph = NetworkGraph(2, {{0, 1}});
  inst.cost.link = {CostFn::queue(0.5)};
  inst.cost.node = {CostFn::queue(0.5), CostFn::queue(0.5)};
  Application app;
  app.chain_len = 1;
  app.destination = 1;
  app.packet_size = {4.0, 1.0};
  app.input_rate = {1.0, 0.0};
  app.comp_weight = {{1.0, 1.0}};
  inst.apps = {app};
  inst.validate();
  BaselineResult res = lpr_sc(inst);
  CHECK_FALSE(res.feasible);
  CHECK(res.cost == kInf);
}

TEST_CASE("the relaxation solver certifies the line-network optimum") {
  Instance inst = cft::line_instance();
  OracleParams op;
  op.gap_tol_rel = 1e-6;
  OracleResult res = frank_wolfe_oracle(inst, op);
  REQUIRE(res.converged);
  CHECK(res.cost == Approx(12.0).epsilon(1e-5));
  CHECK(res.lower_bound <= res.cost + 1e-12);
  CHECK(res.lower_bound >= 12.0 - 1e-4);
}

TEST_CASE("the relaxation brackets the descent result on coupled instances") {
  for (std::uint64_t seed : {83u, 84u}) {
    CAPTURE(seed);
    Instance inst = cft::small_coupled_instance(seed);
    OracleParams op;
    op.gap_tol_rel = 1e-5;
    OracleResult oracle = frank_wolfe_oracle(inst, op);
    REQUIRE(oracle.converged);
    GPResult full = run_gp(inst, initial_strategy(inst), quick_params());
    REQUIRE(full.status == GPStatus::Converged);
    // The relaxation optimizes over a superset of operating points, so its
    // lower bound sits below the strategy-induced cost; near-tight here.
    CHECK(full.final_cost >= oracle.lower_bound - 1e-9 * std::max(1.0, oracle.lower_bound));
    CHECK(full.final_cost <= oracle.cost * 1.01);
    // Aggregates are consistent with the per-commodity flows it returns.
    for (EdgeId e = 0; e < inst.graph.edge_count(); ++e) {
      double agg = 0.0;
      for (AppId a = 0; a < inst.app_count(); ++a)
        for (int k = 0; k <= inst.app(a).chain_len; ++k)
          agg += inst.app(a).packet_size[static_cast<size_t>(k)] * oracle.f[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(e)];
      CHECK(agg == Approx(oracle.F[static_cast<size_t>(e)]).epsilon(1e-6).scale(1.0));
    }
  }
}
