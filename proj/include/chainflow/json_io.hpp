#pragma once

#include <json.hpp>

#include "chainflow/cost.hpp"

namespace chainflow {

// Shared JSON encoding of a cost function:
//   {"kind": "linear", "slope": s}  or  {"kind": "queue", "mu": m}
nlohmann::json cost_to_json(const CostFn& c);
CostFn cost_from_json(const nlohmann::json& j);

}  // namespace chainflow
