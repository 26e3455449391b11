#include "chainflow/harness.hpp"

#include <chrono>
#include <json.hpp>
#include <sstream>

#include "chainflow/flow.hpp"
#include "chainflow/format.hpp"
#include "chainflow/init.hpp"

namespace chainflow {

namespace {

MethodOutcome run_one(const Instance& inst, const std::string& method, const GPParams& params) {
  if (method != "gp" && method != "spoc" && method != "lcof" && method != "lpr-sc")
    throw ValidationError("unknown method '" + method + "'");
  MethodOutcome out;
  out.method = method;
  auto start = std::chrono::steady_clock::now();
  try {
    if (method == "gp") {
      GPResult r = run_gp(inst, initial_strategy(inst), params);
      out.cost = r.final_cost;
      out.converged = r.status == GPStatus::Converged;
    } else if (method == "spoc") {
      BaselineResult r = spoc(inst, params);
      out.cost = r.cost;
      out.converged = r.converged;
    } else if (method == "lcof") {
      BaselineResult r = lcof(inst, params);
      out.cost = r.cost;
      out.converged = r.converged;
    } else if (method == "lpr-sc") {
      BaselineResult r = lpr_sc(inst);
      out.cost = r.cost;
      out.converged = r.converged;
    } else {
      throw ValidationError("unknown method '" + method + "'");
    }
    out.feasible = out.cost < kInf;
  } catch (const Error& e) {
    out.error = e.what();
    out.cost = kInf;
    out.feasible = false;
  }
  out.runtime_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

std::vector<MethodOutcome> compare_methods(const Instance& inst, const std::vector<std::string>& methods,
                                           const GPParams& params, bool enforce_ordering) {
  std::vector<MethodOutcome> outcomes;
  for (const auto& m : methods) outcomes.push_back(run_one(inst, m, params));

  double worst_finite = 0.0;
  for (const auto& o : outcomes)
    if (o.feasible) worst_finite = std::max(worst_finite, o.cost);
  for (auto& o : outcomes)
    o.normalized = (o.feasible && worst_finite > 0) ? o.cost / worst_finite : kInf;

  if (enforce_ordering) {
    const MethodOutcome* gp = nullptr;
    for (const auto& o : outcomes)
      if (o.method == "gp") gp = &o;
    if (gp != nullptr && gp->converged && gp->feasible) {
      for (const auto& o : outcomes) {
        if (o.method == "gp" || !o.feasible) continue;
        if (gp->cost > 1.001 * o.cost)
          throw ConvergenceError("converged optimizer cost " + fmt_double(gp->cost) + " exceeds " + o.method +
                                 " cost " + fmt_double(o.cost) + " by more than 0.1%");
      }
    }
  }
  return outcomes;
}

std::string outcomes_to_csv(const std::vector<MethodOutcome>& outcomes) {
  std::ostringstream os;
  os << "method,cost,normalized,feasible,converged,runtime_sec,error\n";
  for (const auto& o : outcomes)
    os << o.method << "," << fmt_double(o.cost) << "," << fmt_double(o.normalized) << "," << (o.feasible ? 1 : 0)
       << "," << (o.converged ? 1 : 0) << "," << fmt_double(o.runtime_sec) << "," << o.error << "\n";
  return os.str();
}

std::string outcomes_to_json(const std::vector<MethodOutcome>& outcomes, int indent) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& o : outcomes) {
    nlohmann::json j;
    j["method"] = o.method;
    j["cost"] = o.cost == kInf ? nlohmann::json("inf") : nlohmann::json(o.cost);
    j["normalized"] = o.normalized == kInf ? nlohmann::json("inf") : nlohmann::json(o.normalized);
    j["feasible"] = o.feasible;
    j["converged"] = o.converged;
    j["runtime_sec"] = o.runtime_sec;
    if (!o.error.empty()) j["error"] = o.error;
    arr.push_back(j);
  }
  return arr.dump(indent);
}

std::vector<SweepRow> rate_sweep_experiment(const ScenarioConfig& config, const std::vector<double>& scales,
                                            const std::vector<std::string>& methods, const GPParams& params) {
  std::vector<SweepRow> rows;
  std::vector<Instance> instances = sweep_instances(config, SweepAxis::RateScale, scales);
  for (size_t x = 0; x < instances.size(); ++x) {
    std::vector<MethodOutcome> outcomes = compare_methods(instances[x], methods, params);
    for (const auto& o : outcomes) rows.push_back({scales[x], o.method, o.cost, o.feasible});
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& axis_name) {
  std::ostringstream os;
  os << axis_name << ",method,cost,feasible\n";
  for (const auto& r : rows)
    os << fmt_double(r.axis_value) << "," << r.method << "," << fmt_double(r.cost) << "," << (r.feasible ? 1 : 0)
       << "\n";
  return os.str();
}

void hop_metrics(const Instance& inst, const FlowState& flows, double* data_hops, double* result_hops) {
  // Per stage: link packet rate summed over edges, divided by the stage's
  // injection (every stage carries the same total, one packet per packet in).
  double data_links = 0.0, result_links = 0.0, injection = 0.0;
  for (AppId a = 0; a < inst.app_count(); ++a) {
    const Application& app = inst.app(a);
    injection += app.total_input_rate();
    for (int k = 0; k <= app.chain_len; ++k) {
      double on_links = 0.0;
      for (EdgeId e = 0; e < inst.graph.edge_count(); ++e)
        on_links += flows.f[static_cast<size_t>(a)][static_cast<size_t>(k)][static_cast<size_t>(e)];
      if (k == 0)
        data_links += on_links;
      else
        result_links += on_links;
    }
  }
  if (data_hops != nullptr) *data_hops = injection > 0 ? data_links / injection : 0.0;
  if (result_hops != nullptr) *result_hops = injection > 0 ? result_links / injection : 0.0;
}

std::vector<HopRow> hopcount_experiment(const ScenarioConfig& config, const std::vector<double>& packet_bases,
                                        const GPParams& params) {
  std::vector<HopRow> rows;
  std::vector<Instance> instances = sweep_instances(config, SweepAxis::PacketBase, packet_bases);
  for (size_t x = 0; x < instances.size(); ++x) {
    const Instance& inst = instances[x];
    GPResult r = run_gp(inst, initial_strategy(inst), params);
    FlowState flows = solve_traffic(r.final_instance, r.strategy);
    HopRow row{packet_bases[x], 0.0, 0.0, r.final_cost};
    hop_metrics(r.final_instance, flows, &row.data_hops, &row.result_hops);
    rows.push_back(row);
  }
  return rows;
}

std::string hops_to_csv(const std::vector<HopRow>& rows) {
  std::ostringstream os;
  os << "packet0,data_hops,result_hops,cost\n";
  for (const auto& r : rows)
    os << fmt_double(r.packet_base) << "," << fmt_double(r.data_hops) << "," << fmt_double(r.result_hops) << ","
       << fmt_double(r.cost) << "\n";
  return os.str();
}

}  // namespace chainflow
