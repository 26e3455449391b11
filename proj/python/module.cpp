// Python bindings for the chainflow core: instance/strategy I/O, scenario
// generation, the traffic solver, marginals, optimality checks, the
// projected-descent optimizer, baselines, and the convex oracle.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chainflow/baselines.hpp"
#include "chainflow/gp.hpp"
#include "chainflow/harness.hpp"
#include "chainflow/init.hpp"
#include "chainflow/instance.hpp"
#include "chainflow/scenarios.hpp"

namespace py = pybind11;
using namespace chainflow;

PYBIND11_MODULE(_chainflow, m) {
  m.doc() = "flow-level optimizer for service-chain forwarding and computation offloading";

  // Most-derived errors registered last so their translators run first.
  py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<LoopError>(m, "LoopError");
  py::register_exception<SaturationError>(m, "SaturationError");
  py::register_exception<ConvergenceError>(m, "ConvergenceError");

  py::class_<Instance>(m, "Instance")
      .def_static("load", &Instance::load, py::arg("path"))
      .def_static("from_json", &Instance::from_json_string, py::arg("text"))
      .def("save", &Instance::save, py::arg("path"))
      .def("to_json", &Instance::to_json_string, py::arg("indent") = 2)
      .def("validate", &Instance::validate)
      .def_property_readonly("node_count", [](const Instance& i) { return i.graph.node_count(); })
      .def_property_readonly("edge_count", [](const Instance& i) { return i.graph.edge_count(); })
      .def_property_readonly("app_count", &Instance::app_count)
      .def("__repr__", [](const Instance& i) {
        return "<Instance nodes=" + std::to_string(i.graph.node_count()) +
               " edges=" + std::to_string(i.graph.edge_count()) + " apps=" + std::to_string(i.app_count()) + ">";
      });

  py::class_<Strategy>(m, "Strategy")
      .def_static("load", &Strategy::load, py::arg("instance"), py::arg("path"))
      .def_static("from_json", &Strategy::from_json_string, py::arg("instance"), py::arg("text"))
      .def("save", &Strategy::save, py::arg("instance"), py::arg("path"))
      .def("to_json", &Strategy::to_json_string, py::arg("instance"), py::arg("indent") = 2);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("nodes", &ScenarioConfig::nodes)
      .def_readwrite("links", &ScenarioConfig::links)
      .def_readwrite("apps", &ScenarioConfig::apps)
      .def_readwrite("sources_per_app", &ScenarioConfig::sources_per_app)
      .def_readwrite("chain_len", &ScenarioConfig::chain_len)
      .def_readwrite("packet_base", &ScenarioConfig::packet_base)
      .def_readwrite("packet_step", &ScenarioConfig::packet_step)
      .def_readwrite("packet0", &ScenarioConfig::packet0)
      .def_readwrite("link_mean", &ScenarioConfig::link_mean)
      .def_readwrite("comp_mean", &ScenarioConfig::comp_mean)
      .def_readwrite("rate_scale", &ScenarioConfig::rate_scale)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_property_readonly("topology", &ScenarioConfig::topology_name);

  m.def("preset_names", &preset_names);
  m.def("preset_config", &preset_config, py::arg("name"));
  m.def("generate_scenario", &generate_scenario, py::arg("config"));

  py::class_<FlowState>(m, "FlowState")
      .def_readonly("link_load", &FlowState::F)
      .def_readonly("node_load", &FlowState::G)
      .def_readonly("traffic", &FlowState::t)
      .def_readonly("computed", &FlowState::g)
      .def_readonly("link_rate", &FlowState::f);

  m.def("initial_strategy", [](const Instance& inst) { return initial_strategy(inst); }, py::arg("instance"));
  m.def("solve_traffic", &solve_traffic, py::arg("instance"), py::arg("strategy"));
  m.def("total_cost", py::overload_cast<const Instance&, const FlowState&>(&total_cost), py::arg("instance"),
        py::arg("flows"));
  m.def(
      "validate_strategy",
      [](const Instance& inst, const Strategy& phi) {
        ValidationReport r = validate_strategy(inst, phi);
        return py::make_tuple(r.ok(), r.to_json_string(2));
      },
      py::arg("instance"), py::arg("strategy"), "returns (ok, report_json)");

  py::class_<OptimalityReport>(m, "OptimalityReport")
      .def_readonly("satisfied", &OptimalityReport::satisfied)
      .def_readonly("max_residual", &OptimalityReport::max_residual)
      .def("to_json", &OptimalityReport::to_json_string, py::arg("indent") = 2);

  m.def(
      "check_kkt",
      [](const Instance& inst, const Strategy& phi, double tol) {
        FlowState fl = solve_traffic(inst, phi);
        return check_kkt(inst, phi, fl, compute_marginals(inst, phi, fl), tol);
      },
      py::arg("instance"), py::arg("strategy"), py::arg("tol") = 1e-9);
  m.def(
      "check_sufficiency",
      [](const Instance& inst, const Strategy& phi, double tol) {
        FlowState fl = solve_traffic(inst, phi);
        return check_sufficiency(inst, phi, compute_marginals(inst, phi, fl), tol);
      },
      py::arg("instance"), py::arg("strategy"), py::arg("tol") = 1e-9);

  py::class_<DegenerateInstance>(m, "DegenerateInstance")
      .def_readonly("instance", &DegenerateInstance::instance)
      .def_readonly("kkt_strategy", &DegenerateInstance::kkt_strategy)
      .def_readonly("rho", &DegenerateInstance::rho);
  m.def("build_degenerate_instance", &build_degenerate_instance, py::arg("rho"));

  py::class_<GPParams>(m, "GPParams")
      .def(py::init<>())
      .def_readwrite("alpha", &GPParams::alpha)
      .def_readwrite("scale_per_row", &GPParams::scale_per_row)
      .def_readwrite("backtracking", &GPParams::backtracking)
      .def_readwrite("tol", &GPParams::tol)
      .def_readwrite("max_iters", &GPParams::max_iters)
      .def_readwrite("distributed", &GPParams::distributed);

  py::class_<GPResult>(m, "GPResult")
      .def_readonly("strategy", &GPResult::strategy)
      .def_readonly("final_instance", &GPResult::final_instance)
      .def_readonly("final_cost", &GPResult::final_cost)
      .def_readonly("final_residual", &GPResult::final_residual)
      .def_readonly("iterations", &GPResult::iterations)
      .def_property_readonly("status", &GPResult::status_name)
      .def("trajectory_csv", &GPResult::trajectory_csv)
      .def_property_readonly("trajectory", [](const GPResult& r) {
        py::list out;
        for (const auto& it : r.trajectory)
          out.append(py::make_tuple(it.iter, it.cost, it.residual, it.loop_free, it.messages));
        return out;
      });

  m.def(
      "run_gp",
      [](const Instance& inst, const Strategy& init, const GPParams& params, const std::string& events_json) {
        RunOptions opts;
        if (!events_json.empty()) opts.events = Event::from_json_string(events_json);
        return run_gp(inst, init, params, opts);
      },
      py::arg("instance"), py::arg("initial"), py::arg("params") = GPParams{},
      py::arg("events_json") = std::string());

  py::class_<BaselineResult>(m, "BaselineResult")
      .def_readonly("method", &BaselineResult::method)
      .def_readonly("strategy", &BaselineResult::strategy)
      .def_readonly("cost", &BaselineResult::cost)
      .def_readonly("feasible", &BaselineResult::feasible)
      .def_readonly("converged", &BaselineResult::converged)
      .def_readonly("residual", &BaselineResult::residual)
      .def_readonly("iterations", &BaselineResult::iterations);
  m.def("spoc", &spoc, py::arg("instance"), py::arg("params") = GPParams{});
  m.def("lcof", &lcof, py::arg("instance"), py::arg("params") = GPParams{});
  m.def("lpr_sc", &lpr_sc, py::arg("instance"));

  py::class_<OracleParams>(m, "OracleParams")
      .def(py::init<>())
      .def_readwrite("gap_tol_rel", &OracleParams::gap_tol_rel)
      .def_readwrite("gap_tol_abs", &OracleParams::gap_tol_abs)
      .def_readwrite("max_iters", &OracleParams::max_iters);
  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("cost", &OracleResult::cost)
      .def_readonly("gap", &OracleResult::gap)
      .def_readonly("lower_bound", &OracleResult::lower_bound)
      .def_readonly("iterations", &OracleResult::iterations)
      .def_readonly("converged", &OracleResult::converged);
  m.def("frank_wolfe_oracle", &frank_wolfe_oracle, py::arg("instance"), py::arg("params") = OracleParams{});

  py::class_<MethodOutcome>(m, "MethodOutcome")
      .def_readonly("method", &MethodOutcome::method)
      .def_readonly("cost", &MethodOutcome::cost)
      .def_readonly("normalized", &MethodOutcome::normalized)
      .def_readonly("feasible", &MethodOutcome::feasible)
      .def_readonly("converged", &MethodOutcome::converged)
      .def_readonly("error", &MethodOutcome::error);
  m.def("compare_methods", &compare_methods, py::arg("instance"), py::arg("methods"),
        py::arg("params") = GPParams{}, py::arg("enforce_ordering") = false);
}
