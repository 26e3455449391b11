// chainflow: command-line driver for the service-chain forwarding/offloading
// optimizer. Subcommands:
//   gen       write a seeded benchmark instance (and optional DOT rendering)
//   run       projected-descent optimization of one instance
//   baseline  restricted heuristics (spoc, lcof, lpr-sc) or the convex oracle
//   check     validate a strategy file and test its optimality conditions
//   compare   run several methods on one instance, tabulate normalized costs
//   sweep     rate-scale or packet-size experiment over a scenario family
//
// Exit codes: 0 success; 2 validation failure (bad inputs, malformed or
// infeasible strategy, loops); 3 saturation (no finite-cost operating point);
// 4 non-convergence (tolerance not reached, or a certified-ordering check
// failed).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "chainflow/baselines.hpp"
#include "chainflow/format.hpp"
#include "chainflow/gp.hpp"
#include "chainflow/harness.hpp"
#include "chainflow/init.hpp"
#include "chainflow/instance.hpp"
#include "chainflow/scenarios.hpp"

namespace cf = chainflow;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw cf::Error("cannot open for writing: " + path);
  os << text;
  if (!os) throw cf::Error("write failed: " + path);
}

std::string in_dir(const std::string& out_dir, const std::string& name) {
  std::filesystem::path p(name);
  if (p.is_absolute() || out_dir.empty()) return name;
  return (std::filesystem::path(out_dir) / p).string();
}

void ensure_dir(const std::string& out_dir) {
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
}

cf::Topology topology_from_name(const std::string& name) {
  static const std::map<std::string, cf::Topology> table = {
      {"connected-er", cf::Topology::ConnectedER}, {"balanced-tree", cf::Topology::BalancedTree},
      {"fog", cf::Topology::Fog},                  {"abilene", cf::Topology::Abilene},
      {"lhc", cf::Topology::Lhc},                  {"geant", cf::Topology::Geant},
      {"sw", cf::Topology::SmallWorld},
  };
  auto it = table.find(name);
  if (it == table.end()) throw cf::ValidationError("unknown topology: " + name);
  return it->second;
}

cf::CostFn::Kind kind_from_name(const std::string& name) {
  if (name == "linear") return cf::CostFn::Kind::Linear;
  if (name == "queue") return cf::CostFn::Kind::Queue;
  throw cf::ValidationError("unknown cost kind: " + name + " (expected linear or queue)");
}

// Aggregate and per-stage loads of one operating point, for --flows-out.
nlohmann::json flows_to_json(const cf::Instance& inst, const cf::FlowState& flows) {
  nlohmann::json j;
  j["link_load"] = flows.F;
  j["node_load"] = flows.G;
  nlohmann::json per;
  for (cf::AppId a = 0; a < inst.app_count(); ++a) {
    for (int k = 0; k <= inst.app(a).chain_len; ++k) {
      nlohmann::json stage;
      stage["traffic"] = flows.t[static_cast<size_t>(a)][static_cast<size_t>(k)];
      stage["computed"] = flows.g[static_cast<size_t>(a)][static_cast<size_t>(k)];
      stage["link_rate"] = flows.f[static_cast<size_t>(a)][static_cast<size_t>(k)];
      per[std::to_string(a) + "/" + std::to_string(k)] = std::move(stage);
    }
  }
  j["stages"] = std::move(per);
  return j;
}

struct GPFlags {
  double alpha = 0.05;
  double tol = 1e-6;
  int max_iters = 20000;
  bool distributed = false;
  bool no_backtracking = false;
  bool fixed_step = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "base stepsize of the projected update");
    cmd->add_option("--tol", tol, "stop when the optimality residual drops below this");
    cmd->add_option("--max-iters", max_iters, "iteration cap");
    cmd->add_flag("--distributed", distributed, "compute marginals via the message protocol");
    cmd->add_flag("--no-backtracking", no_backtracking, "never halve the step on a cost increase");
    cmd->add_flag("--fixed-step", fixed_step, "do not scale the step by each row's largest excess");
  }
  cf::GPParams params() const {
    cf::GPParams p;
    p.alpha = alpha;
    p.tol = tol;
    p.max_iters = max_iters;
    p.distributed = distributed;
    p.backtracking = !no_backtracking;
    p.scale_per_row = !fixed_step;
    return p;
  }
};

int run_cmd_gen(const cf::ScenarioConfig& cfg, const std::string& out_dir, const std::string& out,
                const std::string& dot) {
  cf::Instance inst = cf::generate_scenario(cfg);
  ensure_dir(out_dir);
  std::string path = in_dir(out_dir, out);
  inst.save(path);
  if (!dot.empty()) write_text(in_dir(out_dir, dot), inst.graph.to_dot());
  std::cout << "wrote " << path << ": " << cfg.topology_name() << ", " << inst.graph.node_count() << " nodes, "
            << inst.graph.edge_count() << " directed links, " << inst.app_count() << " applications\n";
  return 0;
}

int run_cmd_run(const std::string& instance_path, const std::string& strategy_in, const GPFlags& flags,
                const std::string& events_path, const std::string& out_dir, const std::string& out,
                const std::string& strategy_out, const std::string& round_log_path) {
  cf::Instance inst = cf::Instance::load(instance_path);
  cf::Strategy start =
      strategy_in.empty() ? cf::initial_strategy(inst) : cf::Strategy::load(inst, strategy_in);
  cf::RunOptions opts;
  if (!events_path.empty()) opts.events = cf::Event::load(events_path);
  cf::GPResult res = cf::run_gp(inst, start, flags.params(), opts);
  ensure_dir(out_dir);
  if (!out.empty()) write_text(in_dir(out_dir, out), res.trajectory_csv());
  if (!strategy_out.empty()) res.strategy.save(res.final_instance, in_dir(out_dir, strategy_out));
  if (!round_log_path.empty()) write_text(in_dir(out_dir, round_log_path), res.round_log.to_csv());
  std::cout << "status=" << res.status_name() << " cost=" << cf::fmt_double(res.final_cost)
            << " residual=" << cf::fmt_double(res.final_residual) << " iterations=" << res.iterations << "\n";
  return res.status == cf::GPStatus::Converged ? 0 : 4;
}

int run_cmd_baseline(const std::string& instance_path, const std::string& method, const GPFlags& flags,
                     double gap_tol, const std::string& out_dir, const std::string& strategy_out,
                     const std::string& flows_out) {
  cf::Instance inst = cf::Instance::load(instance_path);
  ensure_dir(out_dir);
  if (method == "oracle") {
    cf::OracleParams op;
    op.gap_tol_rel = gap_tol;
    cf::OracleResult res = cf::frank_wolfe_oracle(inst, op);
    if (!flows_out.empty()) {
      nlohmann::json j;
      j["cost"] = cf::fmt_double(res.cost);
      j["gap"] = cf::fmt_double(res.gap);
      j["lower_bound"] = cf::fmt_double(res.lower_bound);
      j["iterations"] = res.iterations;
      j["converged"] = res.converged;
      j["link_load"] = res.F;
      j["node_load"] = res.G;
      write_text(in_dir(out_dir, flows_out), j.dump(2) + "\n");
    }
    std::cout << "oracle cost=" << cf::fmt_double(res.cost) << " lower_bound=" << cf::fmt_double(res.lower_bound)
              << " gap=" << cf::fmt_double(res.gap) << " iterations=" << res.iterations << "\n";
    return res.converged ? 0 : 4;
  }
  cf::BaselineResult res;
  if (method == "spoc")
    res = cf::spoc(inst, flags.params());
  else if (method == "lcof")
    res = cf::lcof(inst, flags.params());
  else if (method == "lpr-sc")
    res = cf::lpr_sc(inst);
  else
    throw cf::ValidationError("unknown method: " + method);
  if (!strategy_out.empty()) res.strategy.save(inst, in_dir(out_dir, strategy_out));
  if (!flows_out.empty() && res.feasible) {
    cf::FlowState flows = cf::solve_traffic(inst, res.strategy);
    write_text(in_dir(out_dir, flows_out), flows_to_json(inst, flows).dump(2) + "\n");
  }
  std::cout << res.method << " cost=" << cf::fmt_double(res.cost) << " feasible=" << (res.feasible ? 1 : 0)
            << " converged=" << (res.converged ? 1 : 0) << " residual=" << cf::fmt_double(res.residual)
            << " iterations=" << res.iterations << "\n";
  if (!res.feasible) return 3;
  return res.converged ? 0 : 4;
}

int run_cmd_check(const std::string& instance_path, const std::string& strategy_path, double tol,
                  const std::string& condition, const std::string& out_dir, const std::string& out) {
  cf::Instance inst = cf::Instance::load(instance_path);
  cf::Strategy phi = cf::Strategy::load(inst, strategy_path);
  cf::ValidationReport vr = cf::validate_strategy(inst, phi);
  nlohmann::json j;
  j["valid"] = vr.ok();
  j["validation"] = nlohmann::json::parse(vr.to_json_string());
  bool satisfied = true;
  if (vr.ok()) {
    cf::FlowState flows = cf::solve_traffic(inst, phi);
    cf::MarginalState marg = cf::compute_marginals(inst, phi, flows);
    j["cost"] = cf::fmt_double(cf::total_cost(inst, flows));
    if (condition == "kkt" || condition == "both") {
      cf::OptimalityReport r = cf::check_kkt(inst, phi, flows, marg, tol);
      satisfied = satisfied && r.satisfied;
      j["kkt"] = nlohmann::json::parse(r.to_json_string());
    }
    if (condition == "sufficiency" || condition == "both") {
      cf::OptimalityReport r = cf::check_sufficiency(inst, phi, marg, tol);
      satisfied = satisfied && r.satisfied;
      j["sufficiency"] = nlohmann::json::parse(r.to_json_string());
    }
  }
  std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    ensure_dir(out_dir);
    write_text(in_dir(out_dir, out), text);
  }
  if (!vr.ok()) {
    std::cerr << "strategy failed validation\n";
    return 2;
  }
  return satisfied ? 0 : 4;
}

int run_cmd_compare(const cf::Instance& inst, const std::vector<std::string>& methods, const GPFlags& flags,
                    bool enforce, const std::string& format, const std::string& out_dir, const std::string& out) {
  std::vector<cf::MethodOutcome> outcomes = cf::compare_methods(inst, methods, flags.params(), enforce);
  std::string text = format == "json" ? cf::outcomes_to_json(outcomes) : cf::outcomes_to_csv(outcomes);
  if (out.empty()) {
    std::cout << text;
  } else {
    ensure_dir(out_dir);
    write_text(in_dir(out_dir, out), text);
    std::cout << "wrote " << in_dir(out_dir, out) << "\n";
  }
  return 0;
}

std::string sweep_rows_json(const std::vector<cf::SweepRow>& rows, const std::string& axis) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j[axis] = r.axis_value;
    j["method"] = r.method;
    j["cost"] = cf::fmt_double(r.cost);
    j["feasible"] = r.feasible;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string hop_rows_json(const std::vector<cf::HopRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["packet0"] = r.packet_base;
    j["data_hops"] = cf::fmt_double(r.data_hops);
    j["result_hops"] = cf::fmt_double(r.result_hops);
    j["cost"] = cf::fmt_double(r.cost);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

int run_cmd_sweep(const cf::ScenarioConfig& cfg, const std::string& kind, const std::vector<double>& values,
                  const std::vector<std::string>& methods, const GPFlags& flags, const std::string& format,
                  const std::string& out_dir, const std::string& out) {
  std::string text;
  if (kind == "rate") {
    auto rows = cf::rate_sweep_experiment(cfg, values, methods, flags.params());
    text = format == "json" ? sweep_rows_json(rows, "rate_scale") : cf::sweep_to_csv(rows, "rate_scale");
  } else if (kind == "hops") {
    auto rows = cf::hopcount_experiment(cfg, values, flags.params());
    text = format == "json" ? hop_rows_json(rows) : cf::hops_to_csv(rows);
  } else {
    throw cf::ValidationError("unknown sweep kind: " + kind + " (expected rate or hops)");
  }
  if (out.empty()) {
    std::cout << text;
  } else {
    ensure_dir(out_dir);
    write_text(in_dir(out_dir, out), text);
    std::cout << "wrote " << in_dir(out_dir, out) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flow-level optimizer for service-chain forwarding and computation offloading"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_dir;
  std::string format = "csv";
  CLI::Option* seed_opt = app.add_option("--seed", seed, "seed for all randomized generation");
  app.add_option("--out-dir", out_dir, "directory for output files (created if missing)");
  app.add_option("--format", format, "table output format")->check(CLI::IsMember({"csv", "json"}));

  // Scenario knobs shared by gen and sweep (and compare --preset).
  struct ScenarioFlags {
    std::string preset;
    std::string topology;
    int nodes = 0, links = 0, apps = 0, sources = 0, chain_len = 0;
    double packet_base = -1.0, packet_step = -1.0, packet0 = -1.0, rate_scale = -1.0;
    double link_mean = -1.0, comp_mean = -1.0;
    std::string link_kind, comp_kind;
    CLI::Option *o_topology = nullptr, *o_nodes = nullptr, *o_links = nullptr, *o_apps = nullptr,
                *o_sources = nullptr, *o_chain = nullptr, *o_pbase = nullptr, *o_pstep = nullptr, *o_p0 = nullptr,
                *o_rscale = nullptr, *o_lmean = nullptr, *o_cmean = nullptr, *o_lkind = nullptr,
                *o_ckind = nullptr;

    void attach(CLI::App* cmd) {
      cmd->add_option("--preset", preset, "named scenario preset (see `gen --list-presets`)");
      o_topology = cmd->add_option("--topology", topology,
                                   "connected-er, balanced-tree, fog, abilene, lhc, geant, or sw");
      o_nodes = cmd->add_option("--nodes", nodes, "node count (random topologies)");
      o_links = cmd->add_option("--links", links, "undirected link count (each becomes two directed links)");
      o_apps = cmd->add_option("--apps", apps, "application count");
      o_sources = cmd->add_option("--sources", sources, "data sources per application");
      o_chain = cmd->add_option("--chain-len", chain_len, "tasks per application");
      o_pbase = cmd->add_option("--packet-base", packet_base, "stage-0 packet size");
      o_pstep = cmd->add_option("--packet-step", packet_step, "per-stage packet size decrement");
      o_p0 = cmd->add_option("--packet0", packet0, "override the stage-0 packet size only");
      o_rscale = cmd->add_option("--rate-scale", rate_scale, "multiplier on every input rate");
      o_lmean = cmd->add_option("--link-mean", link_mean, "mean link capacity (queue) or slope (linear)");
      o_cmean = cmd->add_option("--comp-mean", comp_mean, "mean node capacity (queue) or slope (linear)");
      o_lkind = cmd->add_option("--link-kind", link_kind, "link cost family")
                    ->check(CLI::IsMember({"linear", "queue"}));
      o_ckind = cmd->add_option("--comp-kind", comp_kind, "node cost family")
                    ->check(CLI::IsMember({"linear", "queue"}));
    }
    cf::ScenarioConfig config(std::uint64_t seed_value) const {
      cf::ScenarioConfig cfg = preset.empty() ? cf::ScenarioConfig{} : cf::preset_config(preset);
      if (o_topology->count()) cfg.topology = topology_from_name(topology);
      if (o_nodes->count()) cfg.nodes = nodes;
      if (o_links->count()) cfg.links = links;
      if (o_apps->count()) cfg.apps = apps;
      if (o_sources->count()) cfg.sources_per_app = sources;
      if (o_chain->count()) cfg.chain_len = chain_len;
      if (o_pbase->count()) cfg.packet_base = packet_base;
      if (o_pstep->count()) cfg.packet_step = packet_step;
      if (o_p0->count()) cfg.packet0 = packet0;
      if (o_rscale->count()) cfg.rate_scale = rate_scale;
      if (o_lmean->count()) cfg.link_mean = link_mean;
      if (o_cmean->count()) cfg.comp_mean = comp_mean;
      if (o_lkind->count()) cfg.link_kind = kind_from_name(link_kind);
      if (o_ckind->count()) cfg.comp_kind = kind_from_name(comp_kind);
      cfg.seed = seed_value;
      return cfg;
    }
  };

  // gen
  CLI::App* gen = app.add_subcommand("gen", "generate a seeded benchmark instance");
  gen->fallthrough();
  ScenarioFlags gen_sf;
  gen_sf.attach(gen);
  std::string gen_out = "instance.json";
  std::string gen_dot;
  bool list_presets = false;
  gen->add_option("--out", gen_out, "instance file to write");
  gen->add_option("--dot", gen_dot, "also write a DOT rendering of the graph");
  gen->add_flag("--list-presets", list_presets, "print the preset names and exit");

  // run
  CLI::App* run = app.add_subcommand("run", "optimize one instance by projected descent");
  run->fallthrough();
  std::string run_instance, run_strategy_in, run_events, run_out, run_strategy_out, run_round_log;
  GPFlags run_flags;
  run->add_option("--instance", run_instance, "instance file")->required();
  run->add_option("--strategy-in", run_strategy_in, "starting strategy (default: built-in initializer)");
  run_flags.attach(run);
  run->add_option("--events", run_events, "runtime event script to apply between iterations");
  run->add_option("--out", run_out, "write the per-iteration trajectory CSV here");
  run->add_option("--strategy-out", run_strategy_out, "write the final strategy here");
  run->add_option("--round-log", run_round_log, "write the final iteration's message rounds here (distributed)");

  // baseline
  CLI::App* baseline = app.add_subcommand("baseline", "run a restricted heuristic or the convex oracle");
  baseline->fallthrough();
  std::string bl_instance, bl_method, bl_strategy_out, bl_flows_out;
  GPFlags bl_flags;
  double bl_gap_tol = 1e-4;
  baseline->add_option("--instance", bl_instance, "instance file")->required();
  baseline->add_option("--method", bl_method, "spoc, lcof, lpr-sc, or oracle")
      ->required()
      ->check(CLI::IsMember({"spoc", "lcof", "lpr-sc", "oracle"}));
  bl_flags.attach(baseline);
  baseline->add_option("--gap-tol", bl_gap_tol, "oracle: stop when gap <= gap-tol * cost");
  baseline->add_option("--strategy-out", bl_strategy_out, "write the method's strategy here");
  baseline->add_option("--flows-out", bl_flows_out, "write the resulting loads here (JSON)");

  // check
  CLI::App* check = app.add_subcommand("check", "validate a strategy and test optimality conditions");
  check->fallthrough();
  std::string ck_instance, ck_strategy, ck_condition = "both", ck_out;
  double ck_tol = 1e-6;
  check->add_option("--instance", ck_instance, "instance file")->required();
  check->add_option("--strategy", ck_strategy, "strategy file")->required();
  check->add_option("--tol", ck_tol, "residual tolerance");
  check->add_option("--condition", ck_condition, "which condition to test")
      ->check(CLI::IsMember({"kkt", "sufficiency", "both"}));
  check->add_option("--out", ck_out, "write the JSON report here instead of stdout");

  // compare
  CLI::App* compare = app.add_subcommand("compare", "run several methods on one instance");
  compare->fallthrough();
  std::string cp_instance, cp_out;
  std::vector<std::string> cp_methods = {"gp", "spoc", "lcof", "lpr-sc"};
  bool cp_enforce = false;
  ScenarioFlags cp_sf;
  GPFlags cp_flags;
  compare->add_option("--instance", cp_instance, "instance file (alternative to --preset)");
  cp_sf.attach(compare);
  compare->add_option("--methods", cp_methods, "methods to run")->delimiter(',');
  cp_flags.attach(compare);
  compare->add_flag("--enforce-ordering", cp_enforce,
                    "fail (exit 4) if the converged descent method loses to a feasible baseline");
  compare->add_option("--out", cp_out, "write the table here instead of stdout");

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "rate-scale or packet-size experiment");
  sweep->fallthrough();
  std::string sw_kind = "rate", sw_out;
  std::vector<double> sw_values;
  std::vector<std::string> sw_methods = {"gp", "spoc", "lcof", "lpr-sc"};
  ScenarioFlags sw_sf;
  GPFlags sw_flags;
  sweep->add_option("--kind", sw_kind, "rate: cost vs rate scale; hops: hop counts vs stage-0 packet size")
      ->check(CLI::IsMember({"rate", "hops"}));
  sw_sf.attach(sweep);
  sweep->add_option("--values", sw_values, "axis values (rate scales, or stage-0 packet sizes)")
      ->required()
      ->delimiter(',');
  sweep->add_option("--methods", sw_methods, "methods for the rate sweep")->delimiter(',');
  sw_flags.attach(sweep);
  sweep->add_option("--out", sw_out, "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      if (list_presets) {
        for (const auto& name : cf::preset_names()) std::cout << name << "\n";
        return 0;
      }
      if (seed_opt->count() == 0)
        throw cf::ValidationError("gen requires --seed so the instance is reproducible");
      return run_cmd_gen(gen_sf.config(seed), out_dir, gen_out, gen_dot);
    }
    if (*run)
      return run_cmd_run(run_instance, run_strategy_in, run_flags, run_events, out_dir, run_out, run_strategy_out,
                         run_round_log);
    if (*baseline)
      return run_cmd_baseline(bl_instance, bl_method, bl_flags, bl_gap_tol, out_dir, bl_strategy_out, bl_flows_out);
    if (*check) return run_cmd_check(ck_instance, ck_strategy, ck_tol, ck_condition, out_dir, ck_out);
    if (*compare) {
      cf::Instance inst =
          cp_instance.empty() ? cf::generate_scenario(cp_sf.config(seed)) : cf::Instance::load(cp_instance);
      return run_cmd_compare(inst, cp_methods, cp_flags, cp_enforce, format, out_dir, cp_out);
    }
    if (*sweep) return run_cmd_sweep(sw_sf.config(seed), sw_kind, sw_values, sw_methods, sw_flags, format, out_dir, sw_out);
  } catch (const cf::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const cf::LoopError& e) {
    std::cerr << "loop error: " << e.what() << "\n";
    return 2;
  } catch (const cf::SaturationError& e) {
    std::cerr << "saturation: " << e.what() << "\n";
    return 3;
  } catch (const cf::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
