#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kfdar/metric.hpp"

namespace kfdar {

using Edge = std::pair<Vertex, Vertex>;

// A tree embedded in a metric. `vertices` is sorted; `edges` connect exactly
// those vertices without cycles; `length` is the sum of edge lengths.
struct TreeSolution {
  std::vector<Edge> edges;
  std::vector<Vertex> vertices;
  double length = 0.0;
  std::int64_t covered_weight = 0;
};

// Minimum spanning tree (Prim) over the given vertices. Duplicates are
// ignored; ties resolve toward smaller vertex ids.
TreeSolution mst_tree(const Metric& metric, std::span<const Vertex> vertices);

double mst_length(const Metric& metric, std::span<const Vertex> vertices);

// True when `edges` form a spanning tree of `vertices` (connected, acyclic,
// no foreign endpoints) and `length` matches the metric.
bool is_valid_tree(const Metric& metric, const TreeSolution& tree);

// Depth-first preorder of the tree starting from `start`; children are
// visited in increasing vertex order.
std::vector<Vertex> preorder(const TreeSolution& tree, Vertex start);

}  // namespace kfdar
