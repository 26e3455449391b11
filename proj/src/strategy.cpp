#include "chainflow/strategy.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace chainflow {

using json = nlohmann::json;

Strategy::Strategy(const Instance& inst) {
  rows_.resize(inst.apps.size());
  for (size_t a = 0; a < inst.apps.size(); ++a) {
    const Application& app = inst.apps[a];
    rows_[a].resize(static_cast<size_t>(app.stage_count()));
    for (auto& stage : rows_[a]) {
      stage.resize(static_cast<size_t>(inst.graph.node_count()));
      for (NodeId i = 0; i < inst.graph.node_count(); ++i)
        stage[static_cast<size_t>(i)].out.assign(inst.graph.out_neighbors(i).size(), 0.0);
    }
  }
}

double Strategy::toward(const Instance& inst, AppId a, int k, NodeId i, NodeId j) const {
  int slot = inst.graph.out_slot(i, j);
  if (slot < 0) return 0.0;
  return row(a, k, i).out[static_cast<size_t>(slot)];
}

void Strategy::set_toward(const Instance& inst, AppId a, int k, NodeId i, NodeId j, double v) {
  int slot = inst.graph.out_slot(i, j);
  if (slot < 0) throw ValidationError("(" + std::to_string(i) + "," + std::to_string(j) + ") is not an edge");
  row(a, k, i).out[static_cast<size_t>(slot)] = v;
}

void Strategy::snap_row(AppId a, int k, NodeId i) {
  Row& r = row(a, k, i);
  double target = r.sum();
  double* largest = &r.cpu;
  if (r.cpu > 0 && r.cpu <= kEpsPhi) r.cpu = 0;
  for (double& v : r.out) {
    if (v > 0 && v <= kEpsPhi) v = 0;
    if (v > *largest) largest = &v;
  }
  if (r.cpu > *largest) largest = &r.cpu;
  double drift = target - r.sum();
  if (*largest + drift > 0) *largest += drift;
}

void Strategy::remap(const Instance& old_inst, const Instance& new_inst) {
  Strategy fresh(new_inst);
  for (size_t a = 0; a < rows_.size(); ++a) {
    for (size_t k = 0; k < rows_[a].size(); ++k) {
      for (NodeId i = 0; i < old_inst.graph.node_count(); ++i) {
        const Row& src = rows_[a][k][static_cast<size_t>(i)];
        Row& dst = fresh.rows_[a][k][static_cast<size_t>(i)];
        dst.cpu = src.cpu;
        const auto& old_nbr = old_inst.graph.out_neighbors(i);
        for (size_t s = 0; s < old_nbr.size(); ++s) {
          int slot = new_inst.graph.out_slot(i, old_nbr[s]);
          if (slot >= 0) dst.out[static_cast<size_t>(slot)] = src.out[s];
        }
      }
    }
  }
  rows_ = std::move(fresh.rows_);
}

std::string Strategy::to_json_string(const Instance& inst, int indent) const {
  json rows = json::object();
  for (size_t a = 0; a < rows_.size(); ++a) {
    for (size_t k = 0; k < rows_[a].size(); ++k) {
      for (NodeId i = 0; i < inst.graph.node_count(); ++i) {
        const Row& r = row(static_cast<AppId>(a), static_cast<int>(k), i);
        json dirs = json::object();
        if (r.cpu != 0) dirs["cpu"] = r.cpu;
        const auto& nbr = inst.graph.out_neighbors(i);
        for (size_t s = 0; s < nbr.size(); ++s)
          if (r.out[s] != 0) dirs[std::to_string(nbr[s])] = r.out[s];
        if (!dirs.empty())
          rows[std::to_string(i) + "/" + std::to_string(a) + "/" + std::to_string(k)] = dirs;
      }
    }
  }
  json j;
  j["phi"] = rows;
  return j.dump(indent);
}

Strategy Strategy::from_json_string(const Instance& inst, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("strategy JSON parse error: ") + e.what());
  }
  Strategy phi(inst);
  const json& rows = j.contains("phi") ? j.at("phi") : j;
  for (auto it = rows.begin(); it != rows.end(); ++it) {
    std::istringstream key(it.key());
    std::string si, sa, sk;
    if (!std::getline(key, si, '/') || !std::getline(key, sa, '/') || !std::getline(key, sk, '/'))
      throw ValidationError("strategy key '" + it.key() + "' is not of the form i/a/k");
    NodeId i = std::stoi(si);
    AppId a = std::stoi(sa);
    int k = std::stoi(sk);
    if (a < 0 || a >= inst.app_count() || k < 0 || k > inst.app(a).chain_len || i < 0 || i >= inst.graph.node_count())
      throw ValidationError("strategy key '" + it.key() + "' out of range");
    for (auto dir = it.value().begin(); dir != it.value().end(); ++dir) {
      double v = dir.value().get<double>();
      if (dir.key() == "cpu")
        phi.row(a, k, i).cpu = v;
      else
        phi.set_toward(inst, a, k, i, std::stoi(dir.key()), v);
    }
  }
  return phi;
}

void Strategy::save(const Instance& inst, const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << to_json_string(inst) << "\n";
}

Strategy Strategy::load(const Instance& inst, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(inst, ss.str());
}

}  // namespace chainflow
