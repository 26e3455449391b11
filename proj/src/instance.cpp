#include "chainflow/instance.hpp"

#include <fstream>
#include <sstream>

#include "chainflow/json_io.hpp"

namespace chainflow {

using json = nlohmann::json;

json cost_to_json(const CostFn& c) {
  json j;
  j["kind"] = c.kind_name();
  if (c.kind == CostFn::Kind::Linear)
    j["slope"] = c.param;
  else
    j["mu"] = c.param;
  return j;
}

CostFn cost_from_json(const json& j) {
  if (!j.contains("kind")) throw ValidationError("cost entry missing 'kind'");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") {
    double slope = j.at("slope").get<double>();
    if (slope < 0) throw ValidationError("linear cost slope must be nonnegative");
    return CostFn::linear(slope);
  }
  if (kind == "queue") {
    double mu = j.at("mu").get<double>();
    if (mu <= 0) throw ValidationError("queue capacity must be positive");
    return CostFn::queue(mu);
  }
  throw ValidationError("unknown cost kind '" + kind + "'");
}

void Instance::validate() const {
  int n = graph.node_count();
  if (static_cast<int>(cost.link.size()) != graph.edge_count())
    throw ValidationError("link cost count does not match edge count");
  if (static_cast<int>(cost.node.size()) != n) throw ValidationError("node cost count does not match node count");
  for (size_t a = 0; a < apps.size(); ++a) {
    const Application& app = apps[a];
    if (app.chain_len < 1) throw ValidationError("application chain_len must be >= 1");
    if (app.destination < 0 || app.destination >= n) throw ValidationError("application destination out of range");
    if (static_cast<int>(app.packet_size.size()) != app.chain_len + 1)
      throw ValidationError("packet_size must have chain_len + 1 entries");
    for (double L : app.packet_size)
      if (!(L >= 0)) throw ValidationError("packet sizes must be nonnegative");
    if (static_cast<int>(app.input_rate.size()) != n) throw ValidationError("input_rate must have one entry per node");
    for (double r : app.input_rate)
      if (!(r >= 0)) throw ValidationError("input rates must be nonnegative");
    if (static_cast<int>(app.comp_weight.size()) != app.chain_len)
      throw ValidationError("comp_weight must have chain_len rows");
    for (const auto& row : app.comp_weight) {
      if (static_cast<int>(row.size()) != n) throw ValidationError("comp_weight row must have one entry per node");
      for (double w : row)
        if (!(w > 0)) throw ValidationError("comp weights must be positive (or +inf for incapable)");
    }
  }
}

std::string Instance::to_json_string(int indent) const {
  json j;
  j["nodes"] = graph.node_count();
  json edges = json::array();
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    json je;
    je["from"] = graph.edge(e).from;
    je["to"] = graph.edge(e).to;
    je["cost"] = cost_to_json(cost.link[static_cast<size_t>(e)]);
    edges.push_back(je);
  }
  j["edges"] = edges;
  json nc = json::array();
  for (const CostFn& c : cost.node) nc.push_back(cost_to_json(c));
  j["node_costs"] = nc;
  json japps = json::array();
  for (const Application& app : apps) {
    json ja;
    ja["id"] = app.id;
    ja["chain_len"] = app.chain_len;
    ja["destination"] = app.destination;
    ja["packet_sizes"] = app.packet_size;
    ja["input_rates"] = app.input_rate;
    json weights = json::array();
    for (const auto& row : app.comp_weight) {
      json jrow = json::array();
      for (double w : row) {
        if (w == kInf)
          jrow.push_back(nullptr);
        else
          jrow.push_back(w);
      }
      weights.push_back(jrow);
    }
    ja["comp_weights"] = weights;
    japps.push_back(ja);
  }
  j["applications"] = japps;
  return j.dump(indent);
}

Instance Instance::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("instance JSON parse error: ") + e.what());
  }
  try {
    Instance inst;
    int n = j.at("nodes").get<int>();
    std::vector<std::pair<NodeId, NodeId>> pairs;
    std::vector<CostFn> link_costs;
    for (const json& je : j.at("edges")) {
      if (je.is_array()) {  // compact [i, j] form, default cost
        pairs.emplace_back(je.at(0).get<int>(), je.at(1).get<int>());
        link_costs.push_back(CostFn::linear(1.0));
      } else {
        pairs.emplace_back(je.at("from").get<int>(), je.at("to").get<int>());
        link_costs.push_back(je.contains("cost") ? cost_from_json(je.at("cost")) : CostFn::linear(1.0));
      }
    }
    inst.graph = NetworkGraph(n, pairs);
    // Edge order is preserved by construction, so link costs stay aligned.
    inst.cost.link = std::move(link_costs);
    const json& nc = j.at("node_costs");
    if (nc.is_array()) {
      for (const json& c : nc) inst.cost.node.push_back(cost_from_json(c));
    } else {
      CostFn def = cost_from_json(nc.at("default"));
      inst.cost.node.assign(static_cast<size_t>(n), def);
      if (nc.contains("overrides"))
        for (const json& o : nc.at("overrides"))
          inst.cost.node[o.at("node").get<size_t>()] = cost_from_json(o.at("cost"));
    }
    for (const json& ja : j.at("applications")) {
      Application app;
      app.id = ja.contains("id") ? ja.at("id").get<int>() : static_cast<int>(inst.apps.size());
      app.chain_len = ja.at("chain_len").get<int>();
      app.destination = ja.at("destination").get<int>();
      app.packet_size = ja.at("packet_sizes").get<std::vector<double>>();
      const json& jr = ja.at("input_rates");
      if (jr.is_array()) {
        app.input_rate = jr.get<std::vector<double>>();
      } else {
        app.input_rate.assign(static_cast<size_t>(n), 0.0);
        for (auto it = jr.begin(); it != jr.end(); ++it)
          app.input_rate[static_cast<size_t>(std::stoi(it.key()))] = it.value().get<double>();
      }
      const json& jw = ja.at("comp_weights");
      app.comp_weight.assign(static_cast<size_t>(app.chain_len), std::vector<double>(static_cast<size_t>(n), kInf));
      if (jw.is_number()) {
        double w = jw.get<double>();
        for (auto& row : app.comp_weight) row.assign(static_cast<size_t>(n), w);
      } else if (jw.is_array()) {
        for (int k = 0; k < app.chain_len; ++k) {
          const json& jrow = jw.at(static_cast<size_t>(k));
          for (int i = 0; i < n; ++i) {
            const json& v = jrow.at(static_cast<size_t>(i));
            app.comp_weight[static_cast<size_t>(k)][static_cast<size_t>(i)] = v.is_null() ? kInf : v.get<double>();
          }
        }
      } else {
        if (jw.contains("default") && !jw.at("default").is_null()) {
          double w = jw.at("default").get<double>();
          for (auto& row : app.comp_weight) row.assign(static_cast<size_t>(n), w);
        }
        if (jw.contains("overrides")) {
          for (const json& o : jw.at("overrides")) {
            const json& v = o.at("w");
            app.comp_weight[o.at("k").get<size_t>()][o.at("node").get<size_t>()] = v.is_null() ? kInf : v.get<double>();
          }
        }
      }
      inst.apps.push_back(std::move(app));
    }
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("instance JSON structure error: ") + e.what());
  }
}

void Instance::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << to_json_string() << "\n";
}

Instance Instance::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

}  // namespace chainflow
