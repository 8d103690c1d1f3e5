#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kfdar/instance.hpp"

namespace kfdar {

struct HstNode {
  int parent = -1;
  int level = 0;               // leaves sit one level below the lowest cluster
  double edge = 0.0;           // length of the edge to the parent
  std::vector<int> children;
  Vertex center = -1;          // cluster center (an original vertex)
  std::vector<Vertex> members; // original vertices in the cluster, sorted
};

// Hierarchically well-separated tree over the vertices of a metric. Leaves
// are original vertices; edge lengths double with each level up.
struct Hst {
  std::vector<HstNode> nodes;
  int root = 0;
  std::vector<int> leaf;       // vertex -> leaf node
  std::vector<int> depth;      // per node, edges from the root

  double distance(Vertex u, Vertex v) const;
  int lca(Vertex u, Vertex v) const;
};

// Random partition hierarchy: a random vertex order and a radius multiplier
// beta = 2^U, U uniform in [0, 1), fix per level i balls of radius
// beta * 2^(i-1) * d_min; each vertex joins the first center in the order
// that covers it. A level-i cluster hangs from its parent by an edge of
// 2^(i+1) * d_min. The result dominates the metric: distance(u, v) >= d(u, v)
// for every pair.
Hst frt_embed(const Metric& metric, std::uint64_t seed);

enum class Direction { kGather, kScatter };

// Objects all sharing `hub`: sinks at the hub when gathering, sources at the
// hub when scattering. Orders the far endpoints along a closed walk, cuts the
// walk into runs of at most `capacity` objects and serves each run with one
// round trip from the hub; all cut offsets and both walk directions are
// tried. Returns a closed walk from the hub. Throws InvalidArgument when an
// object is not incident to the hub.
Tour single_source_dar(const Metric& metric, Vertex hub, std::span<const Demand> demands,
                       std::span<const DemandId> objects, std::int64_t capacity,
                       Direction direction);

struct PreemptiveResult {
  Tour tour;
  double length = 0.0;
  Hst hst;
  Metric capped;                              // metric the tree was built on
  std::vector<int> bucket;                    // per demand, the HST node it was grouped at
  std::vector<Vertex> hub;                    // per demand, where it is set down in between
};

// 1-preemptive Dial-a-Ride for unit demands: embed into a tree, group each
// demand at the lca of its endpoints, then per group gather everything to one
// hub vertex and scatter it from there. Every object is set down away from
// its sink at most once.
PreemptiveResult one_preemptive_solve_detailed(const DialARideInstance& instance,
                                               std::uint64_t seed);
Tour one_preemptive_solve(const DialARideInstance& instance, std::uint64_t seed);

// Best of `repeats` seeds starting at `seed`.
PreemptiveResult one_preemptive_best_of(const DialARideInstance& instance, std::uint64_t seed,
                                        int repeats);

}  // namespace kfdar
