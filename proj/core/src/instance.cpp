#include "kfdar/instance.hpp"

#include <algorithm>
#include <sstream>

#include "kfdar/errors.hpp"
#include "kfdar/tree.hpp"

namespace kfdar {
namespace {

void validate_demands(const Metric& metric, const std::vector<Demand>& demands) {
  for (std::size_t i = 0; i < demands.size(); ++i) {
    const auto& d = demands[i];
    if (!metric.valid_vertex(d.s) || !metric.valid_vertex(d.t)) {
      throw InvalidInstance("demand " + std::to_string(i) + " has an endpoint out of range");
    }
    if (d.w < 1) throw InvalidInstance("demand " + std::to_string(i) + " has weight < 1");
  }
}

}  // namespace

void KForestInstance::validate() const {
  validate_demands(metric, demands);
  if (k < 1 || static_cast<std::size_t>(k) > demands.size()) {
    throw InvalidInstance("k must lie in [1, number of demands]");
  }
}

void DialARideInstance::validate() const {
  if (!metric.valid_vertex(root)) throw InvalidInstance("root out of range");
  if (capacity < 1) throw InvalidInstance("capacity must be positive");
  validate_demands(metric, demands);
  for (std::size_t i = 0; i < demands.size(); ++i) {
    if (demands[i].w > capacity) {
      throw InvalidInstance("demand " + std::to_string(i) + " is larger than the capacity");
    }
  }
}

bool DialARideInstance::unit_weights() const {
  return std::all_of(demands.begin(), demands.end(), [](const Demand& d) { return d.w == 1; });
}

std::int64_t DialARideInstance::total_weight() const {
  std::int64_t total = 0;
  for (const auto& d : demands) total += d.w;
  return total;
}

double tour_length(const Metric& metric, const Tour& tour) {
  double total = 0.0;
  for (std::size_t i = 1; i < tour.stops.size(); ++i) {
    total += metric(tour.stops[i - 1].v, tour.stops[i].v);
  }
  return total;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kBadStartOrEnd: return "bad-start-or-end";
    case ViolationKind::kUnknownDemand: return "unknown-demand";
    case ViolationKind::kCapacityOverflow: return "capacity-overflow";
    case ViolationKind::kDropBeforePickup: return "drop-before-pickup";
    case ViolationKind::kDuplicatePickup: return "duplicate-pickup";
    case ViolationKind::kWrongEndpoint: return "wrong-endpoint";
    case ViolationKind::kPreemptionOverflow: return "preemption-overflow";
    case ViolationKind::kUnserved: return "unserved";
  }
  return "unknown";
}

std::string FeasibilityReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream out;
  out << violations.size() << " violation(s)";
  for (const auto& v : violations) {
    out << "\n  " << to_string(v.kind);
    if (v.stop >= 0) out << " stop=" << v.stop;
    if (v.demand >= 0) out << " demand=" << v.demand;
    if (!v.detail.empty()) out << " (" << v.detail << ")";
  }
  return out.str();
}

FeasibilityReport check_tour_feasible(const DialARideInstance& instance, const Tour& tour,
                                      bool allow_preemption, int max_preemptions) {
  enum class State { kWaiting, kCarried, kDelivered };
  const int limit = allow_preemption ? max_preemptions : 0;
  const auto m = instance.demands.size();

  FeasibilityReport report;
  report.preemptions.assign(m, 0);
  auto add = [&](ViolationKind kind, int stop, DemandId d, std::string detail = {}) {
    report.violations.push_back({kind, stop, d, std::move(detail)});
  };

  std::vector<State> state(m, State::kWaiting);
  std::vector<Vertex> location(m);
  std::vector<bool> touched(m, false);
  for (std::size_t i = 0; i < m; ++i) location[i] = instance.demands[i].s;

  if (tour.stops.empty()) {
    add(ViolationKind::kBadStartOrEnd, -1, -1, "tour has no stops");
  } else {
    if (tour.stops.front().v != instance.root) {
      add(ViolationKind::kBadStartOrEnd, 0, -1, "tour does not start at the root");
    }
    if (tour.stops.back().v != instance.root) {
      add(ViolationKind::kBadStartOrEnd, static_cast<int>(tour.stops.size()) - 1, -1,
          "tour does not end at the root");
    }
  }

  std::vector<bool> visited(instance.metric.size(), false);
  std::int64_t load = 0;
  for (std::size_t si = 0; si < tour.stops.size(); ++si) {
    const auto& stop = tour.stops[si];
    const int idx = static_cast<int>(si);
    if (!instance.metric.valid_vertex(stop.v)) {
      add(ViolationKind::kBadStartOrEnd, idx, -1, "stop vertex out of range");
      continue;
    }
    visited[static_cast<std::size_t>(stop.v)] = true;

    for (DemandId d : stop.drop) {
      if (d < 0 || static_cast<std::size_t>(d) >= m) {
        add(ViolationKind::kUnknownDemand, idx, d);
        continue;
      }
      const auto& dem = instance.demands[static_cast<std::size_t>(d)];
      if (state[d] != State::kCarried) {
        add(ViolationKind::kDropBeforePickup, idx, d);
        continue;
      }
      load -= dem.w;
      if (stop.v == dem.t) {
        state[d] = State::kDelivered;
      } else if (++report.preemptions[d] > limit) {
        // Keep replaying as an intermediate drop so later actions make sense.
        add(limit == 0 ? ViolationKind::kWrongEndpoint : ViolationKind::kPreemptionOverflow, idx,
            d, "dropped away from its destination");
        state[d] = State::kWaiting;
        location[d] = stop.v;
      } else {
        state[d] = State::kWaiting;
        location[d] = stop.v;
      }
    }

    bool overflow = false;
    for (DemandId d : stop.pick) {
      if (d < 0 || static_cast<std::size_t>(d) >= m) {
        add(ViolationKind::kUnknownDemand, idx, d);
        continue;
      }
      const auto& dem = instance.demands[static_cast<std::size_t>(d)];
      if (state[d] == State::kCarried) {
        add(ViolationKind::kDuplicatePickup, idx, d);
        continue;
      }
      if (state[d] == State::kDelivered) {
        add(ViolationKind::kDuplicatePickup, idx, d, "picked up after delivery");
        continue;
      }
      if (location[d] != stop.v) {
        add(ViolationKind::kWrongEndpoint, idx, d, "picked up away from where it waits");
        continue;
      }
      touched[d] = true;
      state[d] = State::kCarried;
      load += dem.w;
      if (load > instance.capacity) overflow = true;
    }
    report.max_load = std::max(report.max_load, load);
    if (overflow) {
      add(ViolationKind::kCapacityOverflow, idx, -1,
          "load " + std::to_string(load) + " > " + std::to_string(instance.capacity));
    }
  }

  for (std::size_t d = 0; d < m; ++d) {
    if (state[d] == State::kDelivered) continue;
    const auto& dem = instance.demands[d];
    // Untouched degenerate demands are served by any visit to their vertex.
    if (dem.degenerate() && !touched[d] && visited[static_cast<std::size_t>(dem.s)]) continue;
    add(ViolationKind::kUnserved, -1, static_cast<DemandId>(d));
  }
  return report;
}

LowerBounds lower_bounds(const DialARideInstance& instance) {
  LowerBounds lb;
  std::vector<Vertex> terminals{instance.root};
  for (const auto& d : instance.demands) {
    lb.flow += static_cast<double>(d.w) * instance.metric(d.s, d.t);
    terminals.push_back(d.s);
    terminals.push_back(d.t);
  }
  lb.flow /= static_cast<double>(instance.capacity);
  lb.steiner = mst_length(instance.metric, terminals);
  return lb;
}

TourBuilder::TourBuilder(Vertex start) { tour_.stops.push_back({start, {}, {}}); }

void TourBuilder::move_to(Vertex v) {
  if (tour_.stops.back().v != v) tour_.stops.push_back({v, {}, {}});
}

void TourBuilder::pick(DemandId id) { tour_.stops.back().pick.push_back(id); }

void TourBuilder::drop(DemandId id) {
  if (!tour_.stops.back().pick.empty()) {
    const Vertex v = tour_.stops.back().v;
    tour_.stops.push_back({v, {}, {}});
  }
  tour_.stops.back().drop.push_back(id);
}

void TourBuilder::append(const Tour& tour) {
  for (const auto& stop : tour.stops) {
    move_to(stop.v);
    for (DemandId d : stop.drop) drop(d);
    for (DemandId d : stop.pick) pick(d);
  }
}

Tour TourBuilder::finish(Vertex end) {
  move_to(end);
  return tour_;
}

}  // namespace kfdar
