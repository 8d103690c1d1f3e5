#include "kfdar/dial_a_ride.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "kfdar/errors.hpp"

namespace kfdar {

std::vector<Vertex> tsp_double_mst(const Metric& metric, std::span<const Vertex> terminals) {
  if (terminals.empty()) throw InvalidArgument("closed walk needs at least one terminal");
  for (Vertex v : terminals) {
    if (!metric.valid_vertex(v)) throw InvalidArgument("terminal out of range");
  }
  const TreeSolution tree = mst_tree(metric, terminals);
  return preorder(tree, terminals.front());
}

double cycle_length(const Metric& metric, std::span<const Vertex> order) {
  if (order.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) total += metric(order[i - 1], order[i]);
  return total + metric(order.back(), order.front());
}

Tour service_tree(const TreeSolution& tree, std::span<const Demand> demands,
                  std::span<const DemandId> covered) {
  if (covered.empty()) throw InvalidArgument("tree service needs a covered demand");
  std::vector<DemandId> ids(covered.begin(), covered.end());
  std::sort(ids.begin(), ids.end());
  const Vertex start = demands[static_cast<std::size_t>(ids.front())].s;
  const auto order = preorder(tree, start);

  std::multimap<Vertex, DemandId> at_source;
  std::multimap<Vertex, DemandId> at_sink;
  for (DemandId id : ids) {
    at_source.emplace(demands[static_cast<std::size_t>(id)].s, id);
    at_sink.emplace(demands[static_cast<std::size_t>(id)].t, id);
  }

  TourBuilder b(start);
  for (Vertex v : order) {
    auto [lo, hi] = at_source.equal_range(v);
    if (lo == hi) continue;
    b.move_to(v);
    for (auto it = lo; it != hi; ++it) b.pick(it->second);
  }
  for (Vertex v : order) {
    auto [lo, hi] = at_sink.equal_range(v);
    if (lo == hi) continue;
    b.move_to(v);
    for (auto it = lo; it != hi; ++it) b.drop(it->second);
  }
  return b.finish(start);
}

std::int64_t max_load(std::span<const Demand> demands, const Tour& tour) {
  std::int64_t load = 0;
  std::int64_t peak = 0;
  auto weight = [&](DemandId id) -> std::int64_t {
    if (id < 0 || static_cast<std::size_t>(id) >= demands.size()) return 0;
    return demands[static_cast<std::size_t>(id)].w;
  };
  for (const auto& stop : tour.stops) {
    for (DemandId id : stop.drop) load -= weight(id);
    for (DemandId id : stop.pick) load += weight(id);
    peak = std::max(peak, load);
  }
  return peak;
}

int stretch_groups(std::size_t m) {
  if (m == 0) return 0;
  int j = 0;
  while ((std::size_t{1} << j) < 2 * m) ++j;
  return j;
}

Tour normalize_tour(const DialARideInstance& instance, const Tour& tour) {
  const auto report = check_tour_feasible(instance, tour);
  if (!report.ok()) throw InvalidArgument("tour is not feasible: " + report.summary());

  const std::size_t m = instance.demands.size();
  std::vector<bool> touched(m, false);
  for (const auto& stop : tour.stops) {
    for (DemandId id : stop.pick) touched[static_cast<std::size_t>(id)] = true;
  }
  // First stop index visiting each vertex.
  std::map<Vertex, std::size_t> first_visit;
  for (std::size_t i = 0; i < tour.stops.size(); ++i) first_visit.emplace(tour.stops[i].v, i);
  std::map<std::size_t, std::vector<DemandId>> inserted;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& d = instance.demands[i];
    if (d.degenerate() && !touched[i]) {
      inserted[first_visit.at(d.s)].push_back(static_cast<DemandId>(i));
    }
  }

  // Inserted demands ride alone between the stop's drops and its pickups.
  std::vector<Stop> stops;
  for (std::size_t i = 0; i < tour.stops.size(); ++i) {
    auto it = inserted.find(i);
    if (it == inserted.end()) {
      stops.push_back(tour.stops[i]);
      continue;
    }
    const Vertex v = tour.stops[i].v;
    stops.push_back({v, {}, tour.stops[i].drop});
    for (DemandId id : it->second) {
      stops.push_back({v, {id}, {}});
      stops.push_back({v, {}, {id}});
    }
    stops.push_back({v, tour.stops[i].pick, {}});
  }

  Tour out;
  for (std::size_t i = 0; i < stops.size(); ++i) {
    const bool idle = stops[i].pick.empty() && stops[i].drop.empty();
    if (!idle || i == 0 || i + 1 == stops.size()) out.stops.push_back(std::move(stops[i]));
  }
  return out;
}

Decomposition decompose_tour(const DialARideInstance& instance, const Tour& tour) {
  Decomposition out;
  out.normalized = normalize_tour(instance, tour);
  const std::size_t m = instance.demands.size();
  out.groups = stretch_groups(m);

  const auto& stops = out.normalized.stops;
  std::vector<std::size_t> pick_pos(m, 0);
  std::vector<std::size_t> drop_pos(m, 0);
  for (std::size_t i = 0; i < stops.size(); ++i) {
    for (DemandId id : stops[i].pick) pick_pos[static_cast<std::size_t>(id)] = i;
    for (DemandId id : stops[i].drop) drop_pos[static_cast<std::size_t>(id)] = i;
  }

  // (group, window) -> batch, in emission order.
  std::map<std::pair<int, std::size_t>, std::vector<DemandId>> batches;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t stretch = drop_pos[i] - pick_pos[i];
    int j = 1;
    while ((std::size_t{1} << j) <= stretch) ++j;
    if (j > out.groups) throw std::logic_error("stretch exceeds the group range");
    const std::size_t r = std::size_t{1} << (j - 1);
    batches[{j, pick_pos[i] / r + 1}].push_back(static_cast<DemandId>(i));
  }

  TourBuilder b(instance.root);
  for (auto& [key, batch] : batches) {
    BatchSegment seg;
    seg.group = key.first;
    seg.window = static_cast<int>(key.second);
    std::sort(batch.begin(), batch.end());
    seg.batch = batch;
    std::map<std::size_t, Stop> by_pos;
    for (DemandId id : batch) {
      const auto a = pick_pos[static_cast<std::size_t>(id)];
      const auto z = drop_pos[static_cast<std::size_t>(id)];
      seg.peak = std::max(seg.peak, a);
      auto& ps = by_pos[a];
      ps.v = stops[a].v;
      ps.pick.push_back(id);
      auto& ds = by_pos[z];
      ds.v = stops[z].v;
      ds.drop.push_back(id);
    }
    for (auto& [pos, stop] : by_pos) {
      seg.positions.push_back(pos);
      b.move_to(stop.v);
      for (DemandId id : stop.drop) b.drop(id);
      for (DemandId id : stop.pick) b.pick(id);
      seg.path.push_back(std::move(stop));
    }
    out.segments.push_back(std::move(seg));
  }
  out.tour = b.finish(instance.root);
  out.length = tour_length(instance.metric, out.tour);
  return out;
}

DarResult dar_solve_detailed(const DialARideInstance& instance, const DarOptions& options) {
  instance.validate();
  if (!instance.unit_weights()) {
    throw InvalidInstance("batch-greedy Dial-a-Ride needs unit demand weights");
  }
  DarResult out;
  const std::size_t m = instance.demands.size();

  std::vector<DemandId> residual(m);
  for (std::size_t i = 0; i < m; ++i) residual[i] = static_cast<DemandId>(i);
  while (!residual.empty()) {
    KForestInstance sub;
    sub.metric = instance.metric;
    for (DemandId id : residual) sub.demands.push_back(instance.demands[static_cast<std::size_t>(id)]);
    sub.k = static_cast<int>(
        std::min<std::int64_t>(instance.capacity, static_cast<std::int64_t>(residual.size())));

    RatioSolution sol = ratio_solve(sub, options.algo, options.ratio);
    DarRound round;
    round.residual = residual;
    round.cap = sub.k;
    round.ratio = sol.ratio;
    for (DemandId local : sol.covered) {
      round.covered.push_back(residual[static_cast<std::size_t>(local)]);
    }
    round.tree = std::move(sol.tree);

    std::vector<DemandId> rest;
    std::set_difference(residual.begin(), residual.end(), round.covered.begin(),
                        round.covered.end(), std::back_inserter(rest));
    residual = std::move(rest);
    out.rounds.push_back(std::move(round));
  }

  std::vector<Tour> services;
  std::vector<Vertex> terminals{instance.root};
  std::multimap<Vertex, std::size_t> by_start;
  for (std::size_t r = 0; r < out.rounds.size(); ++r) {
    services.push_back(service_tree(out.rounds[r].tree, instance.demands, out.rounds[r].covered));
    const Vertex start = services.back().stops.front().v;
    terminals.push_back(start);
    by_start.emplace(start, r);
  }
  const auto order = tsp_double_mst(instance.metric, terminals);
  out.stitch_length = cycle_length(instance.metric, order);

  TourBuilder b(instance.root);
  for (Vertex v : order) {
    auto [lo, hi] = by_start.equal_range(v);
    for (auto it = lo; it != hi; ++it) b.append(services[it->second]);
  }
  out.tour = b.finish(instance.root);
  out.length = tour_length(instance.metric, out.tour);
  return out;
}

Tour dar_solve(const DialARideInstance& instance, const DarOptions& options) {
  return dar_solve_detailed(instance, options).tour;
}

double dar_bound_factor(std::size_t m, double rho) {
  if (m == 0) return 2.0;
  return 2.0 + rho * (1.0 + std::log(static_cast<double>(m))) * 6.0 * stretch_groups(m);
}

}  // namespace kfdar
