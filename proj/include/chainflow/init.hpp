#pragma once

#include "chainflow/gp.hpp"
#include "chainflow/strategy.hpp"

namespace chainflow {

// Builds a loop-free feasible starting strategy with finite cost.
//
// Round 0 routes every stage along the zero-load layered shortest-path
// in-tree (link weight packet_size[k] * D'(0), CPU weight comp_weight *
// C'(0)). If the induced loads saturate a queue, it first splits each row
// across its two best label-decreasing directions, then retries with trees
// recomputed under load-aware weights (derivatives evaluated at the previous
// round's loads, clamped below capacity) for a few rounds. Throws
// SaturationError when no finite-cost start is found.
//
// `allowed` restricts usable directions (the path-restricted baselines reuse
// this with their masks).
Strategy initial_strategy(const Instance& inst, const DirectionMask* allowed = nullptr);

// The round-0 tree by itself (no splitting, no load-aware retries): every row
// follows the zero-load layered shortest-path labels. Used by the
// congestion-blind baseline, whose reported cost may be infinite.
Strategy zero_load_tree_strategy(const Instance& inst, const DirectionMask* allowed = nullptr);

}  // namespace chainflow
