#include "kfdar/preemption.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "kfdar/dial_a_ride.hpp"
#include "kfdar/errors.hpp"

namespace kfdar {

double Hst::distance(Vertex u, Vertex v) const {
  int a = leaf[static_cast<std::size_t>(u)];
  int b = leaf[static_cast<std::size_t>(v)];
  double total = 0.0;
  while (a != b) {
    if (depth[static_cast<std::size_t>(a)] >= depth[static_cast<std::size_t>(b)]) {
      total += nodes[static_cast<std::size_t>(a)].edge;
      a = nodes[static_cast<std::size_t>(a)].parent;
    } else {
      total += nodes[static_cast<std::size_t>(b)].edge;
      b = nodes[static_cast<std::size_t>(b)].parent;
    }
  }
  return total;
}

int Hst::lca(Vertex u, Vertex v) const {
  int a = leaf[static_cast<std::size_t>(u)];
  int b = leaf[static_cast<std::size_t>(v)];
  while (a != b) {
    if (depth[static_cast<std::size_t>(a)] >= depth[static_cast<std::size_t>(b)]) {
      a = nodes[static_cast<std::size_t>(a)].parent;
    } else {
      b = nodes[static_cast<std::size_t>(b)].parent;
    }
  }
  return a;
}

Hst frt_embed(const Metric& metric, std::uint64_t seed) {
  const std::size_t n = metric.size();
  if (n == 0) throw InvalidArgument("cannot embed an empty metric");

  std::mt19937_64 rng(seed);
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const double beta = std::exp2(std::uniform_real_distribution<double>(0.0, 1.0)(rng));

  const double dmin = metric.min_positive_distance();
  const double dmax = metric.max_distance();

  Hst hst;
  auto add_node = [&](int parent, int level, double edge, Vertex center,
                      std::vector<Vertex> members) {
    HstNode node;
    node.parent = parent;
    node.level = level;
    node.edge = edge;
    node.center = center;
    node.members = std::move(members);
    const int id = static_cast<int>(hst.nodes.size());
    hst.nodes.push_back(std::move(node));
    hst.depth.push_back(parent < 0 ? 0 : hst.depth[static_cast<std::size_t>(parent)] + 1);
    if (parent >= 0) hst.nodes[static_cast<std::size_t>(parent)].children.push_back(id);
    return id;
  };

  std::vector<Vertex> all(n);
  std::iota(all.begin(), all.end(), 0);
  // Clusters at the lowest level have diameter below d_min, so they only
  // merge points at distance zero.
  int top = 0;
  constexpr int kBottom = -1;
  if (dmin > 0.0) top = std::max(1, static_cast<int>(std::ceil(std::log2(dmax / dmin))) + 1);
  hst.root = add_node(-1, top, 0.0, order[0], all);

  std::vector<int> frontier{hst.root};
  if (dmin > 0.0) {
    for (int level = top - 1; level >= kBottom; --level) {
      const double radius = beta * std::ldexp(dmin, level - 1);
      const double edge = std::ldexp(dmin, level + 1);
      std::vector<int> next;
      for (int parent : frontier) {
        std::map<std::size_t, std::vector<Vertex>> by_center;  // keyed by rank in `order`
        for (Vertex v : hst.nodes[static_cast<std::size_t>(parent)].members) {
          for (std::size_t r = 0; r < n; ++r) {
            if (metric(v, order[r]) <= radius) {
              by_center[r].push_back(v);
              break;
            }
          }
        }
        for (auto& [r, members] : by_center) {
          std::sort(members.begin(), members.end());
          next.push_back(add_node(parent, level, edge, order[r], std::move(members)));
        }
      }
      frontier = std::move(next);
    }
  }

  hst.leaf.assign(n, -1);
  const int leaf_level = hst.nodes[static_cast<std::size_t>(frontier.front())].level - 1;
  for (int parent : frontier) {
    const auto members = hst.nodes[static_cast<std::size_t>(parent)].members;
    for (Vertex v : members) {
      hst.leaf[static_cast<std::size_t>(v)] = add_node(parent, leaf_level, 0.0, v, {v});
    }
  }
  return hst;
}

namespace {

struct Item {
  DemandId id;
  Vertex far;
};

Tour serve_runs(Vertex hub, const std::vector<Item>& seq,
                std::size_t capacity, std::size_t offset, Direction direction) {
  TourBuilder b(hub);
  std::size_t i = 0;
  while (i < seq.size()) {
    std::size_t size = capacity;
    if (i == 0 && offset > 0) size = offset;
    const std::size_t end = std::min(seq.size(), i + size);
    if (direction == Direction::kGather) {
      for (std::size_t j = i; j < end; ++j) {
        b.move_to(seq[j].far);
        b.pick(seq[j].id);
      }
      b.move_to(hub);
      for (std::size_t j = i; j < end; ++j) b.drop(seq[j].id);
    } else {
      b.move_to(hub);
      for (std::size_t j = i; j < end; ++j) b.pick(seq[j].id);
      for (std::size_t j = i; j < end; ++j) {
        b.move_to(seq[j].far);
        b.drop(seq[j].id);
      }
    }
    i = end;
  }
  return b.finish(hub);
}

Tour single_source_items(const Metric& metric, Vertex hub, std::vector<Item> items,
                         std::int64_t capacity, Direction direction) {
  if (items.empty()) return TourBuilder(hub).finish(hub);
  std::vector<Vertex> terminals{hub};
  for (const auto& it : items) terminals.push_back(it.far);
  const auto order = tsp_double_mst(metric, terminals);
  std::map<Vertex, std::size_t> position;
  for (std::size_t i = 0; i < order.size(); ++i) position.emplace(order[i], i);
  std::sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
    const auto pa = position.at(a.far);
    const auto pb = position.at(b.far);
    return pa < pb || (pa == pb && a.id < b.id);
  });

  const auto k = static_cast<std::size_t>(capacity);
  Tour best;
  double best_length = std::numeric_limits<double>::infinity();
  for (int reverse = 0; reverse < 2; ++reverse) {
    std::vector<Item> seq = items;
    if (reverse) std::reverse(seq.begin(), seq.end());
    for (std::size_t offset = 0; offset < std::min(k, seq.size()); ++offset) {
      Tour t = serve_runs(hub, seq, k, offset, direction);
      const double len = tour_length(metric, t);
      if (len < best_length - kDistanceTolerance) {
        best_length = len;
        best = std::move(t);
      }
    }
  }
  return best;
}

Vertex pick_hub(const Metric& metric, const Hst& hst, int node,
                std::span<const Demand> demands, const std::vector<DemandId>& bucket) {
  const auto& first = demands[static_cast<std::size_t>(bucket.front())];
  for (Vertex x : {first.s, first.t}) {
    const bool shared = std::all_of(bucket.begin(), bucket.end(), [&](DemandId id) {
      const auto& d = demands[static_cast<std::size_t>(id)];
      return d.s == x || d.t == x;
    });
    if (shared) return x;
  }
  const auto& n = hst.nodes[static_cast<std::size_t>(node)];
  Vertex best = n.members.front();
  for (Vertex v : n.members) {
    if (metric(v, n.center) < metric(best, n.center)) best = v;
  }
  return best;
}

}  // namespace

Tour single_source_dar(const Metric& metric, Vertex hub, std::span<const Demand> demands,
                       std::span<const DemandId> objects, std::int64_t capacity,
                       Direction direction) {
  if (!metric.valid_vertex(hub)) throw InvalidArgument("hub out of range");
  if (capacity < 1) throw InvalidArgument("capacity must be positive");
  std::vector<Item> items;
  std::vector<DemandId> at_hub;
  for (DemandId id : objects) {
    if (id < 0 || static_cast<std::size_t>(id) >= demands.size()) {
      throw InvalidArgument("unknown object id");
    }
    const auto& d = demands[static_cast<std::size_t>(id)];
    if (d.w != 1) throw InvalidArgument("single-source service needs unit objects");
    const bool incident = direction == Direction::kGather ? d.t == hub : d.s == hub;
    if (!incident) throw InvalidArgument("object is not incident to the hub");
    const Vertex far = direction == Direction::kGather ? d.s : d.t;
    if (far == hub) at_hub.push_back(id);
    else items.push_back({id, far});
  }
  Tour t = single_source_items(metric, hub, std::move(items), capacity, direction);
  if (at_hub.empty()) return t;
  // Objects that start and end at the hub ride one at a time.
  TourBuilder b(hub);
  for (DemandId id : at_hub) {
    b.pick(id);
    b.drop(id);
  }
  b.append(t);
  return b.finish(hub);
}

PreemptiveResult one_preemptive_solve_detailed(const DialARideInstance& instance,
                                               std::uint64_t seed) {
  instance.validate();
  if (!instance.unit_weights()) throw InvalidInstance("1-preemptive solver needs unit demands");
  const Metric& metric = instance.metric;
  const std::size_t n = metric.size();
  const std::size_t m = instance.demands.size();

  PreemptiveResult out;
  // Distances far below the optimum are zeroed so the tree has few levels.
  const double estimate = lower_bounds(instance).best();
  if (m > 0 && estimate > 0.0) {
    const double nn = static_cast<double>(n);
    const double threshold = estimate / (2.0 * static_cast<double>(m) * nn * nn * nn);
    std::vector<double> d(metric.data().begin(), metric.data().end());
    for (double& x : d) {
      if (x < threshold) x = 0.0;
    }
    out.capped = close_matrix(n, std::move(d));
  } else {
    out.capped = metric;
  }
  out.hst = frt_embed(out.capped, seed);

  out.bucket.resize(m);
  out.hub.resize(m);
  std::map<int, std::vector<DemandId>> buckets;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& d = instance.demands[i];
    out.bucket[i] = out.hst.lca(d.s, d.t);
    buckets[out.bucket[i]].push_back(static_cast<DemandId>(i));
  }

  std::map<int, Tour> services;
  for (auto& [node, ids] : buckets) {
    const Vertex hub = pick_hub(metric, out.hst, node, instance.demands, ids);
    std::vector<Item> gather;
    std::vector<Item> scatter;
    for (DemandId id : ids) {
      const auto& d = instance.demands[static_cast<std::size_t>(id)];
      out.hub[static_cast<std::size_t>(id)] = hub;
      if (d.s != hub) gather.push_back({id, d.s});
      if (d.t != hub) scatter.push_back({id, d.t});
    }
    TourBuilder b(hub);
    b.append(single_source_items(metric, hub, std::move(gather), instance.capacity,
                                 Direction::kGather));
    b.append(single_source_items(metric, hub, std::move(scatter), instance.capacity,
                                 Direction::kScatter));
    services.emplace(node, b.finish(hub));
  }

  // Depth-first over the tree, children in index order.
  TourBuilder b(instance.root);
  std::vector<int> stack{out.hst.root};
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    auto it = services.find(node);
    if (it != services.end()) b.append(it->second);
    const auto& kids = out.hst.nodes[static_cast<std::size_t>(node)].children;
    for (auto k = kids.rbegin(); k != kids.rend(); ++k) stack.push_back(*k);
  }
  out.tour = b.finish(instance.root);
  out.length = tour_length(metric, out.tour);
  return out;
}

Tour one_preemptive_solve(const DialARideInstance& instance, std::uint64_t seed) {
  return one_preemptive_solve_detailed(instance, seed).tour;
}

PreemptiveResult one_preemptive_best_of(const DialARideInstance& instance, std::uint64_t seed,
                                        int repeats) {
  if (repeats < 1) throw InvalidArgument("repeat count must be positive");
  PreemptiveResult best = one_preemptive_solve_detailed(instance, seed);
  for (int r = 1; r < repeats; ++r) {
    PreemptiveResult cand =
        one_preemptive_solve_detailed(instance, seed + static_cast<std::uint64_t>(r));
    if (cand.length < best.length - kDistanceTolerance) best = std::move(cand);
  }
  return best;
}

}  // namespace kfdar
