#include "kfdar/nonuniform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "kfdar/errors.hpp"

namespace kfdar {

CostFunction CostFunction::from_table(std::size_t n, const CostTable& table) {
  if (table.edges.size() != table.table.size()) {
    throw InvalidInstance("cost table has " + std::to_string(table.table.size()) + " rows for " +
                          std::to_string(table.edges.size()) + " edges");
  }
  if (table.edges.empty()) {
    if (n > 1) throw DisconnectedGraph("cost table lists no edges");
  }
  const std::size_t width = table.table.empty() ? 1 : table.table.front().size();
  if (width == 0) throw InvalidInstance("cost table rows are empty");
  for (std::size_t e = 0; e < table.edges.size(); ++e) {
    const auto [u, v] = table.edges[e];
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) {
      throw InvalidInstance("cost edge " + std::to_string(e) + " has an endpoint out of range");
    }
    if (u == v) throw InvalidInstance("cost edge " + std::to_string(e) + " is a self-loop");
    const auto& row = table.table[e];
    if (row.size() != width) throw InvalidInstance("cost table rows differ in length");
    for (std::size_t l = 0; l < width; ++l) {
      if (!std::isfinite(row[l]) || row[l] < 0.0) {
        throw InvalidInstance("cost entry is negative or not finite");
      }
      if (l > 0 && row[l] < row[l - 1]) {
        throw InvalidInstance("cost of edge " + std::to_string(e) + " decreases with the load");
      }
    }
  }

  CostFunction cf;
  std::vector<WeightedEdge> edges(table.edges.size());
  for (std::size_t l = 0; l < width; ++l) {
    for (std::size_t e = 0; e < table.edges.size(); ++e) {
      edges[e] = {table.edges[e].first, table.edges[e].second, table.table[e][l]};
    }
    Metric slice = metric_closure(n, edges);
    for (const auto& e : edges) {
      const double closed = slice(e.u, e.v);
      if (e.length - closed > 1e-6 * std::max(e.length, 1e-300)) {
        throw InvalidInstance("load " + std::to_string(l) +
                              " costs violate the triangle inequality on edge (" +
                              std::to_string(e.u) + "," + std::to_string(e.v) + ")");
      }
    }
    cf.slices_.push_back(std::move(slice));
  }
  return cf;
}

CostFunction CostFunction::classical(const Metric& metric, std::int64_t capacity, std::size_t m) {
  if (capacity < 1) throw InvalidArgument("capacity must be positive");
  CostFunction cf;
  const double top = metric.max_distance();
  cf.prohibitive_ = 1e6 * (top > 0.0 ? top : 1.0);
  const std::size_t n = metric.size();
  std::vector<double> flat(n * n, cf.prohibitive_);
  for (std::size_t i = 0; i < n; ++i) flat[i * n + i] = 0.0;
  const Metric heavy = Metric::from_trusted(n, std::move(flat));
  for (std::size_t l = 0; l <= m; ++l) {
    cf.slices_.push_back(static_cast<std::int64_t>(l) <= capacity ? metric : heavy);
  }
  return cf;
}

CostFunction CostFunction::constant(const Metric& metric, std::size_t m) {
  CostFunction cf;
  cf.slices_.assign(m + 1, metric);
  return cf;
}

const Metric& CostFunction::slice(std::size_t load) const {
  if (load >= slices_.size()) {
    throw InvalidArgument("load " + std::to_string(load) + " exceeds the cost table");
  }
  return slices_[load];
}

double CostFunction::cost(Vertex u, Vertex v, std::int64_t load) const {
  if (load < 0) throw InvalidArgument("negative load");
  return slice(static_cast<std::size_t>(load))(u, v);
}

double nonuniform_cost(const CostFunction& cf, std::span<const Demand> demands, const Tour& tour) {
  double total = 0.0;
  std::int64_t load = 0;
  for (std::size_t i = 0; i + 1 < tour.stops.size(); ++i) {
    const auto& stop = tour.stops[i];
    for (DemandId id : stop.drop) load -= demands[static_cast<std::size_t>(id)].w;
    for (DemandId id : stop.pick) load += demands[static_cast<std::size_t>(id)].w;
    total += cf.cost(stop.v, tour.stops[i + 1].v, load);
  }
  return total;
}

double nonuniform_cost(const CostFunction& cf, const DialARideInstance& instance,
                       const Tour& tour) {
  return nonuniform_cost(cf, instance.demands, tour);
}

GreedyBatch nonuniform_greedy_subproblem(const CostFunction& cf, std::span<const Demand> demands,
                                         std::span<const DemandId> uncovered,
                                         const DarOptions& options) {
  if (uncovered.empty()) throw InvalidArgument("no uncovered demands");
  const std::size_t top = std::min(uncovered.size(), cf.max_load());
  if (top == 0) throw InvalidArgument("cost table has no loaded slice");

  std::vector<Demand> local;
  for (DemandId id : uncovered) local.push_back(demands[static_cast<std::size_t>(id)]);

  GreedyBatch best;
  bool have = false;
  for (std::size_t k = 1; k <= top; ++k) {
    KForestInstance sub;
    sub.metric = cf.slice(k);
    sub.demands = local;
    sub.k = static_cast<int>(k);
    const RatioSolution sol = ratio_solve(sub, options.algo, options.ratio);

    std::vector<DemandId> covered;
    for (DemandId i : sol.covered) covered.push_back(uncovered[static_cast<std::size_t>(i)]);
    std::sort(covered.begin(), covered.end());
    Tour segment = service_tree(sol.tree, demands, covered);
    const double cost = nonuniform_cost(cf, demands, segment);
    const double ratio = cost / static_cast<double>(covered.size());
    best.tree_ratio.push_back(sol.ratio);
    best.segment_ratio.push_back(ratio);
    if (!have || ratio < best.ratio - kDistanceTolerance) {
      have = true;
      best.segment = std::move(segment);
      best.covered = std::move(covered);
      best.cost = cost;
      best.ratio = ratio;
      best.load_class = k;
    }
  }
  return best;
}

NonuniformResult nonuniform_dar_solve(const CostFunction& cf, const DialARideInstance& instance,
                                      const DarOptions& options) {
  if (!instance.metric.valid_vertex(instance.root)) throw InvalidInstance("root out of range");
  if (cf.size() != instance.metric.size()) {
    throw InvalidArgument("cost function and instance disagree on the vertex count");
  }
  if (!instance.unit_weights()) throw InvalidInstance("non-uniform costs need unit demands");

  NonuniformResult out;
  std::vector<DemandId> uncovered(instance.demands.size());
  for (std::size_t i = 0; i < uncovered.size(); ++i) uncovered[i] = static_cast<DemandId>(i);
  while (!uncovered.empty()) {
    GreedyBatch batch = nonuniform_greedy_subproblem(cf, instance.demands, uncovered, options);
    std::vector<DemandId> rest;
    std::set_difference(uncovered.begin(), uncovered.end(), batch.covered.begin(),
                        batch.covered.end(), std::back_inserter(rest));
    uncovered = std::move(rest);
    out.batches.push_back(std::move(batch));
  }

  const Metric& empty = cf.slice(0);
  std::vector<Vertex> terminals{instance.root};
  std::multimap<Vertex, std::size_t> by_start;
  for (std::size_t i = 0; i < out.batches.size(); ++i) {
    const Vertex start = out.batches[i].segment.stops.front().v;
    terminals.push_back(start);
    by_start.emplace(start, i);
  }
  TourBuilder b(instance.root);
  for (Vertex v : tsp_double_mst(empty, terminals)) {
    auto [lo, hi] = by_start.equal_range(v);
    for (auto it = lo; it != hi; ++it) b.append(out.batches[it->second].segment);
  }
  out.tour = b.finish(instance.root);
  out.cost = nonuniform_cost(cf, instance.demands, out.tour);
  return out;
}

}  // namespace kfdar
