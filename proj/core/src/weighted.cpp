#include "kfdar/weighted.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "kfdar/errors.hpp"

namespace kfdar {

WeightedPartition partition_demands(const DialARideInstance& instance) {
  instance.validate();
  WeightedPartition out;
  out.capacity = instance.capacity;

  std::map<std::pair<Vertex, Vertex>, PairGroup> groups;
  for (std::size_t i = 0; i < instance.demands.size(); ++i) {
    const auto& d = instance.demands[i];
    auto& g = groups[{d.s, d.t}];
    g.s = d.s;
    g.t = d.t;
    g.total += d.w;
    g.members.push_back(static_cast<DemandId>(i));
  }
  for (auto& [key, g] : groups) out.pairs.push_back(std::move(g));

  const std::int64_t q = instance.capacity;
  out.l = static_cast<int>(out.pairs.size());
  const std::int64_t l = out.l;
  out.rounded = l > 0 && q >= 2 * l;
  out.p = out.rounded ? q / l : 1;
  out.q_rounded = out.rounded ? l * out.p : q;

  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    const std::int64_t t = out.pairs[i].total;
    PairClass c = PairClass::kPrime;
    if (2 * t >= q) c = PairClass::kHigh;
    else if (t * l <= q) c = PairClass::kLow;
    out.cls.push_back(c);
    std::int64_t size = t;
    switch (c) {
      case PairClass::kLow:
        out.low.push_back(i);
        break;
      case PairClass::kHigh:
        out.high.push_back(i);
        break;
      case PairClass::kPrime:
        out.prime.push_back(i);
        if (out.rounded) size = (t + out.p - 1) / out.p * out.p;
        break;
    }
    out.rounded_size.push_back(size);
  }
  return out;
}

DialARideInstance LineInstance::as_instance() const {
  std::vector<Point> pts;
  for (double v : x) pts.push_back({v, 0.0});
  DialARideInstance inst;
  // Coordinates on a line already form a metric; building it directly avoids
  // a cubic closure on long unrolled tours.
  const std::size_t n = x.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::abs(x[i] - x[j]);
  }
  inst.metric = Metric::from_trusted(n, std::move(d));
  inst.points = std::move(pts);
  inst.root = root;
  inst.demands = demands;
  inst.capacity = capacity;
  return inst;
}

Tour line_dar_solve(const LineInstance& line) {
  const std::size_t n = line.x.size();
  if (line.root < 0 || static_cast<std::size_t>(line.root) >= n) {
    throw InvalidInstance("line root out of range");
  }
  if (line.capacity < 1) throw InvalidInstance("capacity must be positive");
  for (const auto& d : line.demands) {
    if (d.s < 0 || d.t < 0 || static_cast<std::size_t>(d.s) >= n ||
        static_cast<std::size_t>(d.t) >= n) {
      throw InvalidInstance("line demand endpoint out of range");
    }
    if (d.w < 1 || d.w > line.capacity) throw InvalidInstance("line demand weight out of range");
  }

  std::vector<Vertex> by_rank(n);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::sort(by_rank.begin(), by_rank.end(), [&](Vertex a, Vertex b) {
    const double xa = line.x[static_cast<std::size_t>(a)];
    const double xb = line.x[static_cast<std::size_t>(b)];
    return xa < xb || (xa == xb && a < b);
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[static_cast<std::size_t>(by_rank[r])] = r;

  const std::size_t m = line.demands.size();
  // Degenerate demands travel with the rightward passes.
  std::vector<bool> rightward(m);
  std::vector<std::vector<DemandId>> waiting_at(n);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& d = line.demands[i];
    rightward[i] = rank[static_cast<std::size_t>(d.t)] >= rank[static_cast<std::size_t>(d.s)];
    waiting_at[static_cast<std::size_t>(d.s)].push_back(static_cast<DemandId>(i));
  }

  std::vector<bool> waiting(m, true);
  std::vector<bool> carried(m, false);
  std::size_t pending = m;
  std::int64_t load = 0;
  TourBuilder b(line.root);

  auto sweep = [&](bool right) {
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t r = right ? step : n - 1 - step;
      const Vertex v = by_rank[r];
      std::vector<DemandId> drops;
      for (std::size_t i = 0; i < m; ++i) {
        if (carried[i] && line.demands[i].t == v) drops.push_back(static_cast<DemandId>(i));
      }
      std::vector<DemandId> picks;
      std::int64_t after = load;
      for (DemandId id : drops) after -= line.demands[static_cast<std::size_t>(id)].w;
      for (DemandId id : waiting_at[static_cast<std::size_t>(v)]) {
        const auto i = static_cast<std::size_t>(id);
        if (!waiting[i] || rightward[i] != right) continue;
        if (after + line.demands[i].w > line.capacity) continue;
        picks.push_back(id);
        after += line.demands[i].w;
      }
      if (drops.empty() && picks.empty()) continue;
      b.move_to(v);
      for (DemandId id : drops) {
        b.drop(id);
        carried[static_cast<std::size_t>(id)] = false;
        load -= line.demands[static_cast<std::size_t>(id)].w;
        --pending;
      }
      std::vector<DemandId> instant;
      for (DemandId id : picks) {
        const auto i = static_cast<std::size_t>(id);
        b.pick(id);
        waiting[i] = false;
        if (line.demands[i].degenerate()) {
          instant.push_back(id);
        } else {
          carried[i] = true;
          load += line.demands[i].w;
        }
      }
      for (DemandId id : instant) {
        b.drop(id);
        --pending;
      }
    }
  };

  while (pending > 0) {
    const std::size_t before = pending;
    sweep(true);
    if (pending > 0) sweep(false);
    if (pending == before) throw std::logic_error("line sweep made no progress");
  }
  return b.finish(line.root);
}

UnitExpansion expand_units(const DialARideInstance& instance) {
  UnitExpansion out;
  out.instance.metric = instance.metric;
  out.instance.root = instance.root;
  out.instance.capacity = instance.capacity;
  out.instance.points = instance.points;
  for (std::size_t i = 0; i < instance.demands.size(); ++i) {
    const auto& d = instance.demands[i];
    for (std::int64_t c = 0; c < d.w; ++c) {
      out.instance.demands.push_back({d.s, d.t, 1});
      out.parent.push_back(static_cast<DemandId>(i));
    }
  }
  return out;
}

LiftResult lift_unweighted_tour_detailed(const DialARideInstance& weighted,
                                         const Tour& unit_tour) {
  const UnitExpansion exp = expand_units(weighted);
  const auto report = check_tour_feasible(exp.instance, unit_tour);
  if (!report.ok()) {
    throw InvalidArgument("tour is not feasible for the unit expansion: " + report.summary());
  }

  const auto& stops = unit_tour.stops;
  std::vector<double> x(stops.size(), 0.0);
  for (std::size_t i = 1; i < stops.size(); ++i) {
    x[i] = x[i - 1] + weighted.metric(stops[i - 1].v, stops[i].v);
  }
  const std::size_t copies = exp.parent.size();
  std::vector<std::size_t> first_visit(weighted.metric.size(), stops.size());
  for (std::size_t i = stops.size(); i-- > 0;) first_visit[static_cast<std::size_t>(stops[i].v)] = i;
  std::vector<std::size_t> pick_at(copies, stops.size());
  std::vector<std::size_t> drop_at(copies, stops.size());
  for (std::size_t i = 0; i < stops.size(); ++i) {
    for (DemandId c : stops[i].pick) pick_at[static_cast<std::size_t>(c)] = i;
    for (DemandId c : stops[i].drop) drop_at[static_cast<std::size_t>(c)] = i;
  }
  for (std::size_t c = 0; c < copies; ++c) {
    if (pick_at[c] == stops.size()) {
      // Untouched degenerate copy, served by the visit.
      const auto at = first_visit[static_cast<std::size_t>(exp.instance.demands[c].s)];
      pick_at[c] = at;
      drop_at[c] = at;
    }
  }

  LiftResult out;
  out.line.x = x;
  out.line.root = 0;
  out.line.capacity = weighted.capacity;
  out.chosen_copy.assign(weighted.demands.size(), copies);
  for (std::size_t c = 0; c < copies; ++c) {
    const auto i = static_cast<std::size_t>(exp.parent[c]);
    const std::size_t cur = out.chosen_copy[i];
    const double span = x[drop_at[c]] - x[pick_at[c]];
    if (cur == copies || span < x[drop_at[cur]] - x[pick_at[cur]]) out.chosen_copy[i] = c;
  }
  for (std::size_t i = 0; i < weighted.demands.size(); ++i) {
    const std::size_t c = out.chosen_copy[i];
    out.line.demands.push_back({static_cast<Vertex>(pick_at[c]), static_cast<Vertex>(drop_at[c]),
                                weighted.demands[i].w});
  }

  out.line_tour = line_dar_solve(out.line);
  TourBuilder b(weighted.root);
  for (const auto& stop : out.line_tour.stops) {
    b.move_to(stops[static_cast<std::size_t>(stop.v)].v);
    for (DemandId id : stop.drop) b.drop(id);
    for (DemandId id : stop.pick) b.pick(id);
  }
  out.tour = b.finish(weighted.root);
  return out;
}

Tour lift_unweighted_tour(const DialARideInstance& weighted, const Tour& unit_tour) {
  return lift_unweighted_tour_detailed(weighted, unit_tour).tour;
}

namespace {

Tour serve_low(const DialARideInstance& instance, const WeightedPartition& part) {
  std::vector<DemandId> ids;
  std::vector<Vertex> terminals{instance.root};
  for (std::size_t i : part.low) {
    const auto& g = part.pairs[i];
    ids.insert(ids.end(), g.members.begin(), g.members.end());
    terminals.push_back(g.s);
    terminals.push_back(g.t);
  }
  TourBuilder b(instance.root);
  if (ids.empty()) return b.finish(instance.root);
  std::sort(ids.begin(), ids.end());
  const auto order = tsp_double_mst(instance.metric, terminals);

  // Everything fits at once; deliver on the first pass where the sink comes
  // after the source, the rest on a second pass.
  std::vector<int> state(instance.demands.size(), 0);  // 0 waiting, 1 aboard, 2 done
  for (int pass = 0; pass < 2; ++pass) {
    for (Vertex v : order) {
      std::vector<DemandId> drops;
      std::vector<DemandId> picks;
      for (DemandId id : ids) {
        const auto& d = instance.demands[static_cast<std::size_t>(id)];
        const auto i = static_cast<std::size_t>(id);
        if (state[i] == 1 && d.t == v) drops.push_back(id);
        if (state[i] == 0 && d.s == v) picks.push_back(id);
      }
      if (drops.empty() && picks.empty()) continue;
      b.move_to(v);
      for (DemandId id : drops) {
        b.drop(id);
        state[static_cast<std::size_t>(id)] = 2;
      }
      for (DemandId id : picks) {
        b.pick(id);
        state[static_cast<std::size_t>(id)] = 1;
      }
    }
  }
  return b.finish(instance.root);
}

// Items heavier than Q/2 ride alone; the rest are packed next-fit.
std::vector<std::vector<DemandId>> pack_pair(const DialARideInstance& instance,
                                             const PairGroup& group) {
  std::vector<std::vector<DemandId>> bins;
  std::vector<DemandId> open;
  std::int64_t open_load = 0;
  for (DemandId id : group.members) {
    const std::int64_t w = instance.demands[static_cast<std::size_t>(id)].w;
    if (2 * w > instance.capacity) {
      bins.push_back({id});
      continue;
    }
    if (open_load + w > instance.capacity) {
      bins.push_back(std::move(open));
      open.clear();
      open_load = 0;
    }
    open.push_back(id);
    open_load += w;
  }
  if (!open.empty()) bins.push_back(std::move(open));
  return bins;
}

Tour serve_high(const DialARideInstance& instance, const WeightedPartition& part,
                std::vector<int>& shuttles) {
  std::vector<Vertex> terminals{instance.root};
  std::multimap<Vertex, std::size_t> by_source;
  for (std::size_t i : part.high) {
    terminals.push_back(part.pairs[i].s);
    by_source.emplace(part.pairs[i].s, i);
  }
  TourBuilder b(instance.root);
  if (part.high.empty()) return b.finish(instance.root);
  for (Vertex v : tsp_double_mst(instance.metric, terminals)) {
    auto [lo, hi] = by_source.equal_range(v);
    for (auto it = lo; it != hi; ++it) {
      const auto& g = part.pairs[it->second];
      for (const auto& bin : pack_pair(instance, g)) {
        b.move_to(g.s);
        for (DemandId id : bin) b.pick(id);
        b.move_to(g.t);
        for (DemandId id : bin) b.drop(id);
        if (g.s != g.t) shuttles[it->second] += 2;
      }
      b.move_to(g.s);
    }
  }
  return b.finish(instance.root);
}

}  // namespace

WeightedResult weighted_dar_solve_detailed(const DialARideInstance& instance,
                                           const DarOptions& options) {
  WeightedResult out;
  out.partition = partition_demands(instance);
  const auto& part = out.partition;
  out.shuttles.assign(part.pairs.size(), 0);

  out.low_tour = serve_low(instance, part);
  out.high_tour = serve_high(instance, part, out.shuttles);

  // Middle pairs: one aggregated demand per pair, sizes in units of p.
  DialARideInstance j;
  j.metric = instance.metric;
  j.root = instance.root;
  j.capacity = part.rounded ? part.l : instance.capacity;
  for (std::size_t i : part.prime) {
    const auto& g = part.pairs[i];
    j.demands.push_back({g.s, g.t, part.rounded_size[i] / part.p});
  }
  TourBuilder pb(instance.root);
  if (!j.demands.empty()) {
    const UnitExpansion exp = expand_units(j);
    out.expanded_demands = exp.instance.demands.size();
    const Tour unit_tour = dar_solve(exp.instance, options);
    const Tour j_tour = lift_unweighted_tour(j, unit_tour);
    for (const auto& stop : j_tour.stops) {
      pb.move_to(stop.v);
      for (DemandId id : stop.drop) {
        for (DemandId m : part.pairs[part.prime[static_cast<std::size_t>(id)]].members) pb.drop(m);
      }
      for (DemandId id : stop.pick) {
        for (DemandId m : part.pairs[part.prime[static_cast<std::size_t>(id)]].members) pb.pick(m);
      }
    }
  }
  out.prime_tour = pb.finish(instance.root);

  TourBuilder b(instance.root);
  b.append(out.low_tour);
  b.append(out.high_tour);
  b.append(out.prime_tour);
  out.tour = b.finish(instance.root);
  out.length = tour_length(instance.metric, out.tour);
  return out;
}

Tour weighted_dar_solve(const DialARideInstance& instance, const DarOptions& options) {
  return weighted_dar_solve_detailed(instance, options).tour;
}

}  // namespace kfdar
