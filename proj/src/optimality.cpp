#include "chainflow/optimality.hpp"

#include <json.hpp>

namespace chainflow {

namespace {

// Residual of one row given the per-direction figures `vals` (cpu slot first
// when usable, then out slots): worst active value minus best available
// value. Infinities: if nothing finite is available the row has no better
// option (residual 0); an active infinite direction above a finite best is an
// infinite residual.
double row_residual(const Row& r, bool cpu_usable, double cpu_val, const std::vector<double>& out_vals,
                    bool* any_active) {
  double best = kInf;
  double worst_active = -kInf;
  *any_active = false;
  if (cpu_usable) {
    best = std::min(best, cpu_val);
    if (r.cpu > kEpsPhi) {
      *any_active = true;
      worst_active = std::max(worst_active, cpu_val);
    }
  }
  for (size_t s = 0; s < out_vals.size(); ++s) {
    best = std::min(best, out_vals[s]);
    if (r.out[s] > kEpsPhi) {
      *any_active = true;
      worst_active = std::max(worst_active, out_vals[s]);
    }
  }
  if (!*any_active) return 0.0;
  if (worst_active == kInf) return best == kInf ? 0.0 : kInf;
  return worst_active - best;
}

OptimalityReport run_check(const Instance& inst, const Strategy& phi, const MarginalState& marg, double tol,
                           bool use_dphi, const FlowState* flows) {
  OptimalityReport rep;
  rep.tol = tol;
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    for (int k = 0; k <= app.chain_len; ++k) {
      for (NodeId i = 0; i < inst.graph.node_count(); ++i) {
        if (i == app.destination && k == app.chain_len) continue;  // results exit here
        const Row& r = phi.row(a, k, i);
        bool cpu_usable = k < app.chain_len;
        const Row& vals = use_dphi ? marg.dD_dphi[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)]
                                   : marg.delta[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)];
        bool degenerate = false;
        if (use_dphi) {
          double ti = flows->t[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(i)];
          degenerate = !(ti > 0.0);
        }
        bool any_active = false;
        double res = row_residual(r, cpu_usable, vals.cpu, vals.out, &any_active);
        if (!any_active) continue;
        rep.rows.push_back({i, a, k, res, degenerate});
        rep.max_residual = std::max(rep.max_residual, res);
      }
    }
  }
  rep.satisfied = rep.max_residual <= tol;
  return rep;
}

}  // namespace

std::string OptimalityReport::to_json_string(int indent) const {
  nlohmann::json j;
  j["satisfied"] = satisfied;
  j["tolerance"] = tol;
  j["max_residual"] = max_residual == kInf ? nlohmann::json("inf") : nlohmann::json(max_residual);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    if (r.residual <= tol && !r.degenerate) continue;  // keep the report readable
    nlohmann::json row;
    row["node"] = r.node;
    row["app"] = r.app;
    row["stage"] = r.k;
    row["residual"] = r.residual == kInf ? nlohmann::json("inf") : nlohmann::json(r.residual);
    row["degenerate"] = r.degenerate;
    arr.push_back(row);
  }
  j["flagged_rows"] = arr;
  j["checked_rows"] = rows.size();
  return j.dump(indent);
}

OptimalityReport check_kkt(const Instance& inst, const Strategy& phi, const FlowState& flows,
                           const MarginalState& marg, double tol) {
  return run_check(inst, phi, marg, tol, /*use_dphi=*/true, &flows);
}

OptimalityReport check_sufficiency(const Instance& inst, const Strategy& phi, const MarginalState& marg, double tol) {
  return run_check(inst, phi, marg, tol, /*use_dphi=*/false, nullptr);
}

DegenerateInstance build_degenerate_instance(double rho) {
  if (!(rho > 0.0) || !(rho < 1.0)) throw ValidationError("degenerate family needs rho in (0, 1)");
  DegenerateInstance d;
  d.rho = rho;

  Instance inst;
  inst.graph = NetworkGraph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {1, 3}});
  inst.cost.link = {CostFn::linear(rho / 3.0), CostFn::linear(rho / 3.0), CostFn::linear(rho / 3.0),
                    CostFn::linear(1.0), CostFn::linear(1.0 - rho / 6.0)};
  inst.cost.node.assign(4, CostFn::linear(0.0));

  Application app;
  app.id = 0;
  app.chain_len = 1;
  app.destination = 3;
  app.packet_size = {1.0, 0.0};
  app.input_rate = {1.0, 0.0, 0.0, 0.0};
  app.comp_weight = {{kInf, kInf, kInf, 1.0}};
  inst.apps.push_back(app);
  inst.validate();
  d.instance = inst;

  // Stationary but suboptimal: every node ships data over its direct link to
  // node 3. The chain 0->1->2->3 (total slope rho) is cheaper than the direct
  // link from 0 (slope 1), but node 1 carries no traffic, so its pointer at
  // the second-priciest link is invisible to the stationarity check.
  Strategy phi(inst);
  phi.set_toward(inst, 0, 0, 0, 3, 1.0);
  phi.set_toward(inst, 0, 0, 1, 3, 1.0);
  phi.set_toward(inst, 0, 0, 2, 3, 1.0);
  phi.row(0, 0, 3).cpu = 1.0;
  phi.set_toward(inst, 0, 1, 0, 3, 1.0);
  phi.set_toward(inst, 0, 1, 1, 3, 1.0);
  phi.set_toward(inst, 0, 1, 2, 3, 1.0);
  d.kkt_strategy = phi;
  return d;
}

}  // namespace chainflow
