#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kfdar/instance.hpp"
#include "kfdar/ratio.hpp"
#include "kfdar/tree.hpp"

namespace kfdar {

// Visiting order of a closed walk through `terminals`: preorder of their MST
// from terminals[0], duplicates removed. The closed walk is at most twice the
// MST. Throws InvalidArgument on an empty terminal set.
std::vector<Vertex> tsp_double_mst(const Metric& metric, std::span<const Vertex> terminals);

// Length of the closed walk visiting `order` and returning to order[0].
double cycle_length(const Metric& metric, std::span<const Vertex> order);

// Closed walk from the source of covered.front(): one preorder pass over the
// tree picks up every covered demand at its source, a second pass drops each
// at its sink, then the walk returns to the start. Uses instance-level demand
// ids.
Tour service_tree(const TreeSolution& tree, std::span<const Demand> demands,
                  std::span<const DemandId> covered);

// Largest load over the replay of `tour`; actions on unknown ids are ignored.
std::int64_t max_load(std::span<const Demand> demands, const Tour& tour);

// A piece of a batch-structured tour: every pickup comes before every drop.
struct BatchSegment {
  std::vector<Stop> path;
  std::vector<DemandId> batch;           // sorted
  std::vector<std::size_t> positions;    // stop index in the normalized input, per path stop
  std::size_t peak = 0;                  // normalized stop index where the whole batch is aboard
  int group = 0;                         // stretch class j, stretch in [2^(j-1), 2^j)
  int window = 0;                        // window index l within the group
};

struct Decomposition {
  Tour normalized;                   // input with idle stops removed
  std::vector<BatchSegment> segments;
  Tour tour;                         // root, segments in emission order, root
  double length = 0.0;
  int groups = 0;                    // ceil(log2(2m))
};

// Drops stops without actions (except the first and last) and gives every
// untouched degenerate demand an explicit pickup and drop at its first visit.
// The vehicle carries nothing else in between, so in the rare case it arrives
// there full the normalized tour may exceed the capacity by that one demand.
// Never longer than the input. Throws InvalidArgument on infeasible input.
Tour normalize_tour(const DialARideInstance& instance, const Tour& tour);

// Rewrites a feasible non-preemptive tour as a concatenation of batch
// segments: demands are grouped by stretch, each group is cut into windows
// of r = 2^(j-1) stops, and every non-empty window becomes one segment.
// Throws InvalidArgument when the tour is not feasible.
Decomposition decompose_tour(const DialARideInstance& instance, const Tour& tour);

// ceil(log2(2m)) for m >= 1, 0 for m = 0.
int stretch_groups(std::size_t m);

struct DarOptions {
  RatioAlgo algo = RatioAlgo::kBest;
  RatioOptions ratio;
};

struct DarRound {
  std::vector<DemandId> residual;  // uncovered at the start of the round
  std::vector<DemandId> covered;   // served by this round's tree
  TreeSolution tree;
  double ratio = 0.0;
  int cap = 0;                     // covered-demand cap passed to the ratio solver
};

struct DarResult {
  Tour tour;
  double length = 0.0;
  std::vector<DarRound> rounds;
  double stitch_length = 0.0;      // closed walk over root and tree starts
};

// Batch-greedy Dial-a-Ride for unit demands. Each round covers up to
// `capacity` uncovered demands with a minimum-ratio tree and services it with
// two passes; the services are stitched along a closed walk from the root.
// Throws InvalidInstance when a demand weight differs from 1.
DarResult dar_solve_detailed(const DialARideInstance& instance, const DarOptions& options = {});
Tour dar_solve(const DialARideInstance& instance, const DarOptions& options = {});

// Budget the solver is held to on an instance with m demands, against the
// optimum: 2 + rho * (1 + ln m) * 6 * ceil(log2(2m)).
double dar_bound_factor(std::size_t m, double rho);

}  // namespace kfdar
