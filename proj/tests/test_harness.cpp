#include <doctest.h>

#include <cmath>
#include <sstream>

#include "chainflow/harness.hpp"
#include "chainflow/init.hpp"
#include "helpers.hpp"

using namespace chainflow;
using doctest::Approx;

namespace {

GPParams quick_params() {
  GPParams p;
  p.tol = 1e-6;
  p.max_iters = 20000;
  return p;
}

const MethodOutcome& by_method(const std::vector<MethodOutcome>& v, const std::string& name) {
  for (const auto& o : v)
    if (o.method == name) return o;
  REQUIRE(false);
  return v.front();
}

}  // namespace

TEST_CASE("a lone method is its own yardstick") {
  Instance inst = cft::line_instance();
  auto outcomes = compare_methods(inst, {"gp"}, quick_params());
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].method == "gp");
  CHECK(outcomes[0].feasible);
  CHECK(outcomes[0].converged);
  CHECK(outcomes[0].normalized == Approx(1.0));
  CHECK(outcomes[0].error.empty());
  CHECK(outcomes[0].runtime_sec >= 0.0);
}

TEST_CASE("the four methods line up in one table") {
  Instance inst = cft::small_coupled_instance(91);
  auto outcomes = compare_methods(inst, {"gp", "spoc", "lcof", "lpr-sc"}, quick_params(), true);
  REQUIRE(outcomes.size() == 4);
  const MethodOutcome& gp = by_method(outcomes, "gp");
  CHECK(gp.feasible);
  CHECK(gp.converged);
  double worst = 0.0;
  for (const auto& o : outcomes)
    if (o.feasible) worst = std::max(worst, o.cost);
  for (const auto& o : outcomes) {
    if (!o.feasible) continue;
    CHECK(o.normalized == Approx(o.cost / worst).epsilon(1e-12));
    CHECK(gp.cost <= o.cost * 1.001);
  }

  std::string csv = outcomes_to_csv(outcomes);
  CHECK(csv.rfind("method,cost,normalized,feasible,converged,runtime_sec,error\n", 0) == 0);
  size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 5);
  std::string js = outcomes_to_json(outcomes);
  CHECK(js.find("\"method\": \"gp\"") != std::string::npos);
  CHECK(js.find("\"normalized\"") != std::string::npos);
}

TEST_CASE("per-method failures are recorded rather than fatal") {
  // Saturated: one path, capacity 0.5, load 1. Every method fails feasibly.
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

  auto outcomes = compare_methods(inst, {"lpr-sc", "gp"}, quick_params());
  REQUIRE(outcomes.size() == 2);
  const MethodOutcome& lpr = by_method(outcomes, "lpr-sc");
  CHECK_FALSE(lpr.feasible);
  CHECK(lpr.cost == kInf);
  const MethodOutcome& gp = by_method(outcomes, "gp");
  CHECK_FALSE(gp.feasible);
  CHECK_FALSE(gp.error.empty());  // the saturation is named, not swallowed
  std::string csv = outcomes_to_csv(outcomes);
  CHECK(csv.find("inf") != std::string::npos);
}

TEST_CASE("unknown method names are rejected") {
  Instance inst = cft::line_instance();
  CHECK_THROWS_AS(compare_methods(inst, {"gp", "annealing"}, quick_params()), ValidationError);
}

TEST_CASE("the rate sweep emits one row per scale and method") {
  ScenarioConfig config = preset_config("abilene");
  config.seed = 3;
  std::vector<double> scales = {1.0, 1.3};
  auto rows = rate_sweep_experiment(config, scales, {"gp", "lcof"}, quick_params());
  REQUIRE(rows.size() == 4);
  // Costs rise with load, method by method.
  double gp_lo = -1, gp_hi = -1, lcof_lo = -1, lcof_hi = -1;
  for (const SweepRow& r : rows) {
    REQUIRE(r.feasible);
    if (r.method == "gp")
      (r.axis_value == 1.0 ? gp_lo : gp_hi) = r.cost;
    else
      (r.axis_value == 1.0 ? lcof_lo : lcof_hi) = r.cost;
  }
  CHECK(gp_lo > 0);
  CHECK(gp_hi > gp_lo);
  CHECK(lcof_hi > lcof_lo);
  CHECK(gp_lo <= lcof_lo * 1.001);
  CHECK(gp_hi <= lcof_hi * 1.001);

  std::string csv = sweep_to_csv(rows, "rate_scale");
  CHECK(csv.rfind("rate_scale,method,cost,feasible\n", 0) == 0);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line.rfind("1,gp,", 0) == 0);
}

TEST_CASE("hop metrics average link crossings per injected packet") {
  Instance inst = cft::line_instance();
  Strategy phi = cft::line_strategy(inst, 0.25);
  FlowState fl = solve_traffic(inst, phi);
  double data = 0, result = 0;
  hop_metrics(inst, fl, &data, &result);
  CHECK(data == Approx(0.75).epsilon(1e-12));    // 1 - q hops for data
  CHECK(result == Approx(1.25).epsilon(1e-12));  // 1 + q hops for results

  std::vector<HopRow> rows = {{2.5, 0.3, 2.9, 10.0}, {5.0, 0.2, 3.1, 11.0}};
  std::string csv = hops_to_csv(rows);
  CHECK(csv.rfind("packet0,data_hops,result_hops,cost\n", 0) == 0);
  CHECK(csv.find("2.5,0.3,2.9,10\n") != std::string::npos);
}

TEST_CASE("shrinking the data packets makes shipping data relatively cheaper") {
  ScenarioConfig config = preset_config("abilene");
  config.seed = 3;
  config.rate_scale = 1.3;
  GPParams params = quick_params();
  auto rows = hopcount_experiment(config, {2.5, 10.0}, params);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].data_hops >= rows[1].data_hops);  // big packets travel less
  for (const HopRow& r : rows) CHECK(r.cost < kInf);
}
