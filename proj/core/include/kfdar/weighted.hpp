#pragma once

#include <cstdint>
#include <vector>

#include "kfdar/dial_a_ride.hpp"
#include "kfdar/instance.hpp"

namespace kfdar {

// All demands sharing one ordered (source, sink) pair.
struct PairGroup {
  Vertex s = 0;
  Vertex t = 0;
  std::int64_t total = 0;            // T_i, summed weights
  std::vector<DemandId> members;     // sorted
};

enum class PairClass { kLow, kHigh, kPrime };

// Pairs are classified by T_i against Q/l and Q/2, with l the number of
// pairs. A pair meeting both thresholds is high. When Q >= 2l the middle
// pairs are rounded up to multiples of p = floor(Q/l).
struct WeightedPartition {
  std::vector<PairGroup> pairs;
  std::vector<PairClass> cls;        // per pair
  std::vector<std::size_t> low;
  std::vector<std::size_t> high;
  std::vector<std::size_t> prime;
  std::int64_t capacity = 1;         // Q
  int l = 0;
  bool rounded = false;              // Q >= 2l
  std::int64_t p = 1;                // floor(Q/l) when rounded, else 1
  std::int64_t q_rounded = 0;        // l * p when rounded, else Q
  std::vector<std::int64_t> rounded_size;  // per pair; T'_i for prime pairs, else T_i
};

WeightedPartition partition_demands(const DialARideInstance& instance);

// A Dial-a-Ride instance whose vertices sit at coordinates x on a line.
struct LineInstance {
  std::vector<double> x;
  Vertex root = 0;
  std::vector<Demand> demands;
  std::int64_t capacity = 1;

  // The same instance as a metric one, for checking and bounds.
  DialARideInstance as_instance() const;
};

// Alternating sweeps: rightward passes carry right-going demands, leftward
// passes left-going ones; each pass drops what it can and picks up whatever
// still fits, until everything is delivered.
Tour line_dar_solve(const LineInstance& line);

// Each demand i becomes w_i unit copies; parent[c] is the demand of copy c.
struct UnitExpansion {
  DialARideInstance instance;
  std::vector<DemandId> parent;
};
UnitExpansion expand_units(const DialARideInstance& instance);

struct LiftResult {
  Tour tour;
  LineInstance line;     // the shortest-copy line instance along the unrolled input
  Tour line_tour;
  std::vector<std::size_t> chosen_copy;  // per demand, index into the expansion
};

// Turns a tour feasible for the unit expansion of `weighted` into one
// feasible for `weighted`: each demand rides along the shortest stretch of
// the input walk used by any of its copies, the resulting line instance is
// solved by line_dar_solve and mapped back. Throws InvalidArgument when the
// input tour is infeasible for the expansion.
LiftResult lift_unweighted_tour_detailed(const DialARideInstance& weighted, const Tour& unit_tour);
Tour lift_unweighted_tour(const DialARideInstance& weighted, const Tour& unit_tour);

struct WeightedResult {
  Tour tour;
  double length = 0.0;
  WeightedPartition partition;
  std::vector<int> shuttles;       // per pair; loaded plus empty trips for high pairs
  Tour low_tour;
  Tour high_tour;
  Tour prime_tour;
  std::size_t expanded_demands = 0;  // unit demands solved for the middle pairs
};

WeightedResult weighted_dar_solve_detailed(const DialARideInstance& instance,
                                           const DarOptions& options = {});
Tour weighted_dar_solve(const DialARideInstance& instance, const DarOptions& options = {});

}  // namespace kfdar
