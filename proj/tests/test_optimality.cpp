#include <doctest.h>

#include <cmath>

#include "chainflow/gp.hpp"
#include "chainflow/init.hpp"
#include "helpers.hpp"

using namespace chainflow;
using doctest::Approx;

namespace {

struct Solved {
  FlowState flows;
  MarginalState marg;
};

Solved solve(const Instance& inst, const Strategy& phi) {
  Solved s{solve_traffic(inst, phi), {}};
  s.marg = compute_marginals(inst, phi, s.flows);
  return s;
}

}  // namespace

TEST_CASE("stationarity alone accepts a point the stronger condition rejects") {
  for (double rho : {0.1, 0.5, 0.9}) {
    CAPTURE(rho);
    DegenerateInstance deg = build_degenerate_instance(rho);
    REQUIRE_NOTHROW(deg.instance.validate());
    Solved s = solve(deg.instance, deg.kkt_strategy);
    CHECK(std::abs(total_cost(deg.instance, s.flows) - 1.0) <= 1e-9);

    OptimalityReport kkt = check_kkt(deg.instance, deg.kkt_strategy, s.flows, s.marg, 1e-9);
    CHECK(kkt.satisfied);
    CHECK(kkt.max_residual <= 1e-9);
    bool saw_degenerate = false;
    for (const auto& row : kkt.rows) saw_degenerate |= row.degenerate;
    CHECK(saw_degenerate);  // the blind spot: a zero-traffic row passes vacuously

    OptimalityReport suff = check_sufficiency(deg.instance, deg.kkt_strategy, s.marg, 1e-9);
    CHECK_FALSE(suff.satisfied);
    CHECK(suff.max_residual == Approx(1.0 - (5.0 / 6.0) * rho).epsilon(1e-9));
  }
}

TEST_CASE("descent escapes the stationary-but-suboptimal point") {
  DegenerateInstance deg = build_degenerate_instance(0.1);
  GPParams params;
  params.alpha = 0.05;
  params.tol = 1e-8;
  params.max_iters = 5000;
  GPResult res = run_gp(deg.instance, deg.kkt_strategy, params);
  CHECK(res.status == GPStatus::Converged);
  CHECK(res.final_cost <= deg.rho * 1.01);
  Solved s = solve(res.final_instance, res.strategy);
  OptimalityReport suff = check_sufficiency(res.final_instance, res.strategy, s.marg, 1e-6);
  CHECK(suff.satisfied);
}

TEST_CASE("the two checks agree at a verified optimum") {
  Instance inst = cft::small_coupled_instance(41);
  GPParams params;
  // Tighter than the 1e-6 the optimizer defaults to; 1e-8 is unreliable
  // because cost-comparison noise floors the residual around 3e-8.
  params.tol = 1e-7;
  params.max_iters = 20000;
  GPResult res = run_gp(inst, initial_strategy(inst), params);
  REQUIRE(res.status == GPStatus::Converged);
  Solved s = solve(inst, res.strategy);
  OptimalityReport kkt = check_kkt(inst, res.strategy, s.flows, s.marg, 1e-6);
  OptimalityReport suff = check_sufficiency(inst, res.strategy, s.marg, 1e-6);
  CHECK(kkt.satisfied);
  CHECK(suff.satisfied);
  // Same rows examined; the residual units differ (traffic-weighted vs not).
  CHECK(kkt.rows.size() == suff.rows.size());
}

TEST_CASE("report serialization carries per-row residuals") {
  DegenerateInstance deg = build_degenerate_instance(0.5);
  Solved s = solve(deg.instance, deg.kkt_strategy);
  OptimalityReport suff = check_sufficiency(deg.instance, deg.kkt_strategy, s.marg, 1e-9);
  std::string text = suff.to_json_string();
  CHECK(text.find("\"satisfied\": false") != std::string::npos);
  CHECK(text.find("\"max_residual\"") != std::string::npos);
  CHECK(text.find("\"flagged_rows\"") != std::string::npos);
  CHECK(text.find("\"tolerance\"") != std::string::npos);
  CHECK(text.find("\"residual\"") != std::string::npos);
}

TEST_CASE("the known-answer family rejects parameters outside (0,1)") {
  CHECK_THROWS_AS(build_degenerate_instance(0.0), ValidationError);
  CHECK_THROWS_AS(build_degenerate_instance(1.0), ValidationError);
  CHECK_THROWS_AS(build_degenerate_instance(-0.5), ValidationError);
}
