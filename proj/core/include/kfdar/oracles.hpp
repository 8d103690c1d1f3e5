#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kfdar/instance.hpp"
#include "kfdar/kforest.hpp"
#include "kfdar/nonuniform.hpp"
#include "kfdar/ratio.hpp"
#include "kfdar/tree.hpp"

// Exhaustive solvers for desk-scale instances. Each has a hard size limit and
// throws TooLarge beyond it.
namespace kfdar::oracle {

inline constexpr std::size_t kMaxSteinerTerminals = 12;
inline constexpr std::size_t kMaxRatioDemands = 6;
inline constexpr std::size_t kMaxRatioVertices = 8;
inline constexpr std::size_t kMaxDarDemands = 5;
inline constexpr std::size_t kMaxDarVertices = 6;
inline constexpr std::size_t kMaxTspTerminals = 13;

// Minimum Steiner tree over `terminals` (Dreyfus-Wagner).
TreeSolution exact_steiner_tree(const Metric& metric, std::span<const Vertex> terminals);

// Steiner tree length for every vertex subset, indexed by bitmask; the metric
// may have at most kMaxRatioVertices vertices.
std::vector<double> steiner_table(const Metric& metric);

// Minimum of Steiner(endpoints of S) / |S| over demand subsets with
// 1 <= |S| <= k; ties go to the lexicographically smaller S.
RatioSolution exact_ratio_oracle(const KForestInstance& instance);

// Cheapest forest connecting at least k pairs, over all subsets of k pairs
// and all ways to split them into separately connected groups.
KForestSolution exact_kforest_oracle(const KForestInstance& instance);

struct DarOptimum {
  Tour tour;
  double length = 0.0;
};

// Uniform-cost search over (vertex, per-demand state) with weighted loads.
// With `costs`, a move costs the slice of the current load instead of the
// metric distance.
DarOptimum exact_dar_oracle(const DialARideInstance& instance, const CostFunction* costs = nullptr);

// Shortest closed tour through the distinct terminals (Held-Karp).
double held_karp_tsp(const Metric& metric, std::span<const Vertex> terminals);

// Minimum over all subsets of uncovered demands and all pickup and drop
// orders of (path cost) / (subset size), the path starting at the first
// pickup and ending at the last drop. At most 4 demands.
double best_batch_ratio(const CostFunction& cf, std::span<const Demand> demands,
                        std::span<const DemandId> uncovered);

// Straightforward replay of the tour semantics, written independently of
// check_tour_feasible.
bool replay_feasible(const DialARideInstance& instance, const Tour& tour, int max_preemptions = 0);

}  // namespace kfdar::oracle
