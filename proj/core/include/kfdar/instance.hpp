#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kfdar/metric.hpp"

namespace kfdar {

// Demand ids are 0-based indices into the owning instance's demand list.
using DemandId = int;

struct Demand {
  Vertex s = 0;
  Vertex t = 0;
  std::int64_t w = 1;

  bool degenerate() const { return s == t; }
  friend bool operator==(const Demand&, const Demand&) = default;
};

struct KForestInstance {
  Metric metric;
  std::vector<Demand> demands;
  int k = 1;

  // Throws InvalidInstance unless 1 <= k <= |demands| and endpoints are valid.
  void validate() const;
};

// Load-dependent edge costs in raw file form: table[e][l] is the cost of
// traversing edges[e] while carrying l objects.
struct CostTable {
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::vector<std::vector<double>> table;
};

struct DialARideInstance {
  Metric metric;
  Vertex root = 0;
  std::vector<Demand> demands;
  std::int64_t capacity = 1;
  // Coordinates the metric was built from, when there were any.
  std::optional<std::vector<Point>> points;

  void validate() const;
  bool unit_weights() const;
  std::int64_t total_weight() const;
};

struct Stop {
  Vertex v = 0;
  std::vector<DemandId> pick;
  std::vector<DemandId> drop;

  friend bool operator==(const Stop&, const Stop&) = default;
};

// A closed vehicle route. At each stop the drops are processed before the
// pickups. A feasible tour starts and ends at the instance root.
struct Tour {
  std::vector<Stop> stops;

  friend bool operator==(const Tour&, const Tour&) = default;
};

double tour_length(const Metric& metric, const Tour& tour);

enum class ViolationKind {
  kBadStartOrEnd,
  kUnknownDemand,
  kCapacityOverflow,
  kDropBeforePickup,
  kDuplicatePickup,
  kWrongEndpoint,
  kPreemptionOverflow,
  kUnserved,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int stop = -1;        // stop index, -1 when not tied to one
  DemandId demand = -1;  // -1 when not tied to one
  std::string detail;
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  std::int64_t max_load = 0;
  // Intermediate drops per demand.
  std::vector<int> preemptions;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Replays the tour and records every violation. With allow_preemption the
// vehicle may drop an object away from its destination and pick it up again
// there later, at most max_preemptions times per object.
FeasibilityReport check_tour_feasible(const DialARideInstance& instance, const Tour& tour,
                                      bool allow_preemption = false, int max_preemptions = 0);

struct LowerBounds {
  double steiner = 0.0;
  double flow = 0.0;

  double best() const { return steiner > flow ? steiner : flow; }
};

// flow = sum w_i d(s_i, t_i) / Q; steiner = MST over the root and all demand
// endpoints. Both bound every feasible tour, preemptive ones included.
LowerBounds lower_bounds(const DialARideInstance& instance);

// Incrementally assembles a Tour. Consecutive visits to the same vertex share
// a stop unless a drop follows a pickup there, which starts a new stop so the
// pickup-then-drop order survives.
class TourBuilder {
 public:
  explicit TourBuilder(Vertex start);

  void move_to(Vertex v);
  void pick(DemandId id);
  void drop(DemandId id);
  // Travels to the first stop of `tour` and replays all of its stops.
  void append(const Tour& tour);

  Vertex position() const { return tour_.stops.back().v; }
  Tour finish(Vertex end);

 private:
  Tour tour_;
};

}  // namespace kfdar
