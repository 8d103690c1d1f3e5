#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kfdar/dial_a_ride.hpp"
#include "kfdar/instance.hpp"
#include "kfdar/ratio.hpp"

namespace kfdar {

// Load-dependent travel costs. slice(l) is the metric the vehicle pays while
// carrying l objects, for l = 0..max_load().
class CostFunction {
 public:
  // Validates a raw edge table against an n-vertex space: every row has the
  // same length, entries are finite, non-negative and non-decreasing in the
  // load, and closing each slice changes no listed edge by more than 1e-6
  // relative. Throws InvalidInstance or DisconnectedGraph.
  static CostFunction from_table(std::size_t n, const CostTable& table);

  // Classical capacitated instance: the metric itself up to `capacity`,
  // a prohibitive 1e6 * max distance for heavier loads, up to load m.
  static CostFunction classical(const Metric& metric, std::int64_t capacity, std::size_t m);

  // Same metric for every load 0..m.
  static CostFunction constant(const Metric& metric, std::size_t m);

  std::size_t size() const { return slices_.empty() ? 0 : slices_.front().size(); }
  std::size_t max_load() const { return slices_.size() - 1; }
  const Metric& slice(std::size_t load) const;
  // Throws InvalidArgument when `load` exceeds max_load().
  double cost(Vertex u, Vertex v, std::int64_t load) const;

  // The sentinel used by classical(); 0 for other cost functions.
  double prohibitive() const { return prohibitive_; }

 private:
  std::vector<Metric> slices_;
  double prohibitive_ = 0.0;
};

// Sum over consecutive stops of the slice cost at the load carried on that
// hop. Loads count demand weights.
double nonuniform_cost(const CostFunction& cf, std::span<const Demand> demands, const Tour& tour);
double nonuniform_cost(const CostFunction& cf, const DialARideInstance& instance, const Tour& tour);

struct GreedyBatch {
  Tour segment;                    // closed walk, starts empty at a covered source
  std::vector<DemandId> covered;   // instance-level ids
  double cost = 0.0;               // nonuniform cost of the segment
  double ratio = 0.0;              // cost / covered.size()
  std::size_t load_class = 0;      // the k whose slice produced the tree
  // Per k = 1..|uncovered| (index k - 1): the ratio-tree ratio in slice k
  // and the segment ratio it leads to.
  std::vector<double> tree_ratio;
  std::vector<double> segment_ratio;
};

// For each k, solves minimum-ratio k-forest in slice k over the uncovered
// demands, services the tree with two passes and keeps the k with the best
// cost per demand. Throws InvalidArgument when `uncovered` is empty.
GreedyBatch nonuniform_greedy_subproblem(const CostFunction& cf, std::span<const Demand> demands,
                                         std::span<const DemandId> uncovered,
                                         const DarOptions& options = {});

struct NonuniformResult {
  Tour tour;
  double cost = 0.0;
  std::vector<GreedyBatch> batches;
};

// Greedy loop over nonuniform_greedy_subproblem; services are stitched along
// a closed walk in slice 0 from the root. The instance capacity is not used:
// heavy loads are priced by the cost function instead.
NonuniformResult nonuniform_dar_solve(const CostFunction& cf, const DialARideInstance& instance,
                                      const DarOptions& options = {});

}  // namespace kfdar
