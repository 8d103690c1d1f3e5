#include "kfdar/oracles.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "kfdar/errors.hpp"

namespace kfdar::oracle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw TooLarge(what);
}

// Dreyfus-Wagner tables. dp[mask][v]: cheapest tree spanning the terminals in
// mask plus v. joint[mask][v]: same, with v of degree >= 2 (or v the lone
// terminal).
struct SteinerDp {
  std::size_t n = 0;
  std::vector<Vertex> terms;
  std::vector<std::vector<double>> dp;
  std::vector<std::vector<double>> joint;
  std::vector<std::vector<Vertex>> via;       // argmin u for dp
  std::vector<std::vector<std::uint32_t>> cut;  // split for joint

  SteinerDp(const Metric& metric, std::vector<Vertex> terminals) : n(metric.size()), terms(std::move(terminals)) {
    const std::size_t t = terms.size();
    const std::size_t full = std::size_t{1} << t;
    dp.assign(full, std::vector<double>(n, kInf));
    joint.assign(full, std::vector<double>(n, kInf));
    via.assign(full, std::vector<Vertex>(n, -1));
    cut.assign(full, std::vector<std::uint32_t>(n, 0));
    for (std::size_t mask = 1; mask < full; ++mask) {
      if ((mask & (mask - 1)) == 0) {
        const auto i = static_cast<std::size_t>(__builtin_ctzll(mask));
        joint[mask][static_cast<std::size_t>(terms[i])] = 0.0;
      } else {
        const std::size_t low = mask & (~mask + 1);
        for (std::size_t v = 0; v < n; ++v) {
          double best = kInf;
          std::uint32_t best_sub = 0;
          for (std::size_t sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
            if (!(sub & low)) continue;
            const double c = dp[sub][v] + dp[mask ^ sub][v];
            if (c < best) {
              best = c;
              best_sub = static_cast<std::uint32_t>(sub);
            }
          }
          joint[mask][v] = best;
          cut[mask][v] = best_sub;
        }
      }
      // Closed metric: one relaxation step reaches every vertex.
      for (std::size_t v = 0; v < n; ++v) {
        double best = kInf;
        Vertex arg = -1;
        for (std::size_t u = 0; u < n; ++u) {
          const double c = joint[mask][u] + metric(static_cast<Vertex>(u), static_cast<Vertex>(v));
          if (c < best) {
            best = c;
            arg = static_cast<Vertex>(u);
          }
        }
        dp[mask][v] = best;
        via[mask][v] = arg;
      }
    }
  }

  void collect(std::size_t mask, Vertex v, std::vector<Vertex>& out) const {
    out.push_back(v);
    const Vertex u = via[mask][static_cast<std::size_t>(v)];
    out.push_back(u);
    if ((mask & (mask - 1)) == 0) return;
    const std::size_t sub = cut[mask][static_cast<std::size_t>(u)];
    collect(sub, u, out);
    collect(mask ^ sub, u, out);
  }
};

std::vector<Vertex> unique_sorted(std::span<const Vertex> vs) {
  std::vector<Vertex> out(vs.begin(), vs.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::uint32_t endpoint_mask(std::span<const Demand> demands, std::uint32_t subset) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < demands.size(); ++i) {
    if (subset & (1u << i)) mask |= (1u << demands[i].s) | (1u << demands[i].t);
  }
  return mask;
}

std::vector<Vertex> mask_vertices(std::uint32_t mask) {
  std::vector<Vertex> out;
  for (Vertex v = 0; mask; ++v, mask >>= 1) {
    if (mask & 1u) out.push_back(v);
  }
  return out;
}

void check_small_kforest(const KForestInstance& instance) {
  require(instance.demands.size() <= kMaxRatioDemands,
          "oracle limited to " + std::to_string(kMaxRatioDemands) + " demands");
  require(instance.metric.size() <= kMaxRatioVertices,
          "oracle limited to " + std::to_string(kMaxRatioVertices) + " vertices");
}

}  // namespace

TreeSolution exact_steiner_tree(const Metric& metric, std::span<const Vertex> terminals) {
  auto terms = unique_sorted(terminals);
  require(terms.size() <= kMaxSteinerTerminals,
          "Steiner oracle limited to " + std::to_string(kMaxSteinerTerminals) + " terminals");
  for (Vertex v : terms) {
    if (!metric.valid_vertex(v)) throw InvalidArgument("terminal out of range");
  }
  if (terms.size() <= 1) return mst_tree(metric, terms);
  const SteinerDp dp(metric, terms);
  const std::size_t full = (std::size_t{1} << terms.size()) - 1;
  std::vector<Vertex> vertices;
  dp.collect(full, terms.front(), vertices);
  return mst_tree(metric, unique_sorted(vertices));
}

std::vector<double> steiner_table(const Metric& metric) {
  require(metric.size() <= kMaxRatioVertices,
          "Steiner table limited to " + std::to_string(kMaxRatioVertices) + " vertices");
  std::vector<Vertex> all(metric.size());
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = static_cast<Vertex>(v);
  const std::size_t full = std::size_t{1} << all.size();
  std::vector<double> out(full, 0.0);
  if (all.empty()) return out;
  const SteinerDp dp(metric, all);
  for (std::size_t mask = 1; mask < full; ++mask) {
    const auto first = static_cast<std::size_t>(__builtin_ctzll(mask));
    out[mask] = dp.dp[mask][first];
  }
  return out;
}

RatioSolution exact_ratio_oracle(const KForestInstance& instance) {
  check_small_kforest(instance);
  const std::size_t m = instance.demands.size();
  if (m == 0) throw Infeasible("no demands to cover");
  const auto cap = static_cast<std::size_t>(std::min<int>(std::max(instance.k, 1), static_cast<int>(m)));
  const auto table = steiner_table(instance.metric);

  double best = kInf;
  std::vector<DemandId> best_set;
  std::uint32_t best_mask = 0;
  for (std::uint32_t subset = 1; subset < (1u << m); ++subset) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(subset));
    if (size > cap) continue;
    const std::uint32_t mask = endpoint_mask(instance.demands, subset);
    const double ratio = table[mask] / static_cast<double>(size);
    std::vector<DemandId> set;
    for (std::size_t i = 0; i < m; ++i) {
      if (subset & (1u << i)) set.push_back(static_cast<DemandId>(i));
    }
    const bool better = ratio < best - kDistanceTolerance ||
                        (ratio <= best + kDistanceTolerance && set < best_set);
    if (better) {
      best = ratio;
      best_set = std::move(set);
      best_mask = mask;
    }
  }

  RatioSolution out;
  out.tree = exact_steiner_tree(instance.metric, mask_vertices(best_mask));
  out.covered = best_set;
  out.tree.covered_weight = static_cast<std::int64_t>(best_set.size());
  out.ratio = out.tree.length / static_cast<double>(best_set.size());
  return out;
}

KForestSolution exact_kforest_oracle(const KForestInstance& instance) {
  check_small_kforest(instance);
  const std::size_t m = instance.demands.size();
  if (instance.k < 1) throw InvalidArgument("k must be at least 1");
  if (static_cast<std::size_t>(instance.k) > m) throw Infeasible("k exceeds the number of demands");
  const auto table = steiner_table(instance.metric);

  // forest[S]: cheapest forest connecting every pair in S, split into groups
  // that are each spanned by one Steiner tree.
  const std::uint32_t full = 1u << m;
  std::vector<double> forest(full, kInf);
  std::vector<std::uint32_t> first_group(full, 0);
  forest[0] = 0.0;
  for (std::uint32_t s = 1; s < full; ++s) {
    const std::uint32_t low = s & (~s + 1);
    for (std::uint32_t g = s; g > 0; g = (g - 1) & s) {
      if (!(g & low)) continue;
      const double c = table[endpoint_mask(instance.demands, g)] + forest[s ^ g];
      if (c < forest[s] - kDistanceTolerance) {
        forest[s] = c;
        first_group[s] = g;
      }
    }
  }

  std::uint32_t best = 0;
  for (std::uint32_t s = 1; s < full; ++s) {
    if (__builtin_popcount(s) != instance.k) continue;
    if (best == 0 || forest[s] < forest[best] - kDistanceTolerance) best = s;
  }

  KForestSolution out;
  for (std::uint32_t s = best; s > 0; s ^= first_group[s]) {
    const std::uint32_t g = first_group[s];
    out.trees.push_back(
        exact_steiner_tree(instance.metric, mask_vertices(endpoint_mask(instance.demands, g))));
    out.length += out.trees.back().length;
  }
  out.connected = connected_pairs(instance, out.trees);
  out.rounds = 0;
  return out;
}

DarOptimum exact_dar_oracle(const DialARideInstance& instance, const CostFunction* costs) {
  const std::size_t n = instance.metric.size();
  const std::size_t m = instance.demands.size();
  require(m <= kMaxDarDemands, "Dial-a-Ride oracle limited to " + std::to_string(kMaxDarDemands) +
                                   " demands");
  require(n <= kMaxDarVertices, "Dial-a-Ride oracle limited to " +
                                    std::to_string(kMaxDarVertices) + " vertices");
  instance.validate();
  if (costs && costs->size() != n) throw InvalidArgument("cost function size mismatch");

  std::size_t codes = 1;
  std::vector<std::size_t> pow3(m + 1, 1);
  for (std::size_t i = 0; i < m; ++i) {
    pow3[i + 1] = pow3[i] * 3;
    codes *= 3;
  }
  auto digit = [&](std::size_t code, std::size_t i) { return (code / pow3[i]) % 3; };
  auto load_of = [&](std::size_t code) {
    std::int64_t load = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (digit(code, i) == 1) load += instance.demands[i].w;
    }
    return load;
  };

  // Action: 0 move, 1 pick, 2 drop; arg is the vertex or demand.
  struct Back {
    std::size_t from = 0;
    int action = -1;
    int arg = -1;
  };
  const std::size_t states = n * codes;
  std::vector<double> dist(states, kInf);
  std::vector<Back> back(states);
  auto index = [&](std::size_t v, std::size_t code) { return code * n + v; };
  const std::size_t done = codes - 1;  // every digit 2

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  const std::size_t start = index(static_cast<std::size_t>(instance.root), 0);
  dist[start] = 0.0;
  pq.push({0.0, start});
  const std::size_t goal = index(static_cast<std::size_t>(instance.root), done);

  auto relax = [&](std::size_t from, std::size_t to, double c, int action, int arg) {
    if (dist[from] + c < dist[to]) {
      dist[to] = dist[from] + c;
      back[to] = {from, action, arg};
      pq.push({dist[to], to});
    }
  };

  while (!pq.empty()) {
    const auto [d, s] = pq.top();
    pq.pop();
    if (d > dist[s]) continue;
    if (s == goal) break;
    const std::size_t v = s % n;
    const std::size_t code = s / n;
    const std::int64_t load = load_of(code);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& dem = instance.demands[i];
      const auto st = digit(code, i);
      if (st == 0 && static_cast<std::size_t>(dem.s) == v && load + dem.w <= instance.capacity) {
        relax(s, index(v, code + pow3[i]), 0.0, 1, static_cast<int>(i));
      } else if (st == 1 && static_cast<std::size_t>(dem.t) == v) {
        relax(s, index(v, code + pow3[i]), 0.0, 2, static_cast<int>(i));
      }
    }
    if (costs && static_cast<std::size_t>(load) > costs->max_load()) continue;
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v) continue;
      const auto a = static_cast<Vertex>(v);
      const auto b = static_cast<Vertex>(u);
      const double c = costs ? costs->cost(a, b, load) : instance.metric(a, b);
      relax(s, index(u, code), c, 0, b);
    }
  }
  if (dist[goal] == kInf) throw Infeasible("no feasible tour");

  std::vector<Back> steps;
  for (std::size_t s = goal; s != start; s = back[s].from) steps.push_back(back[s]);
  std::reverse(steps.begin(), steps.end());
  TourBuilder b(instance.root);
  for (const auto& st : steps) {
    if (st.action == 0) b.move_to(st.arg);
    else if (st.action == 1) b.pick(st.arg);
    else b.drop(st.arg);
  }
  DarOptimum out;
  out.tour = b.finish(instance.root);
  out.length = dist[goal];
  return out;
}

double held_karp_tsp(const Metric& metric, std::span<const Vertex> terminals) {
  const auto terms = unique_sorted(terminals);
  require(terms.size() <= kMaxTspTerminals,
          "TSP oracle limited to " + std::to_string(kMaxTspTerminals) + " terminals");
  const std::size_t t = terms.size();
  if (t <= 1) return 0.0;
  // best[mask][j]: shortest path from terms[0] through mask ending at j.
  const std::size_t full = std::size_t{1} << t;
  std::vector<std::vector<double>> best(full, std::vector<double>(t, kInf));
  best[1][0] = 0.0;
  for (std::size_t mask = 1; mask < full; mask += 2) {
    for (std::size_t j = 0; j < t; ++j) {
      const double cur = best[mask][j];
      if (cur == kInf) continue;
      for (std::size_t x = 1; x < t; ++x) {
        if (mask & (std::size_t{1} << x)) continue;
        const std::size_t next = mask | (std::size_t{1} << x);
        best[next][x] = std::min(best[next][x], cur + metric(terms[j], terms[x]));
      }
    }
  }
  double out = kInf;
  for (std::size_t j = 1; j < t; ++j) {
    out = std::min(out, best[full - 1][j] + metric(terms[j], terms[0]));
  }
  return out;
}

double best_batch_ratio(const CostFunction& cf, std::span<const Demand> demands,
                        std::span<const DemandId> uncovered) {
  require(uncovered.size() <= 4, "batch oracle limited to 4 demands");
  if (uncovered.empty()) throw InvalidArgument("no uncovered demands");
  double best = kInf;
  const std::size_t m = uncovered.size();
  for (std::uint32_t subset = 1; subset < (1u << m); ++subset) {
    std::vector<DemandId> ids;
    for (std::size_t i = 0; i < m; ++i) {
      if (subset & (1u << i)) ids.push_back(uncovered[i]);
    }
    std::vector<DemandId> picks = ids;
    do {
      std::vector<DemandId> drops = ids;
      do {
        double cost = 0.0;
        std::int64_t load = 0;
        Vertex at = demands[static_cast<std::size_t>(picks.front())].s;
        for (DemandId id : picks) {
          const Vertex next = demands[static_cast<std::size_t>(id)].s;
          cost += cf.cost(at, next, load);
          at = next;
          load += demands[static_cast<std::size_t>(id)].w;
        }
        for (DemandId id : drops) {
          const Vertex next = demands[static_cast<std::size_t>(id)].t;
          cost += cf.cost(at, next, load);
          at = next;
          load -= demands[static_cast<std::size_t>(id)].w;
        }
        best = std::min(best, cost / static_cast<double>(ids.size()));
      } while (std::next_permutation(drops.begin(), drops.end()));
    } while (std::next_permutation(picks.begin(), picks.end()));
  }
  return best;
}

bool replay_feasible(const DialARideInstance& instance, const Tour& tour, int max_preemptions) {
  const auto& stops = tour.stops;
  if (stops.empty() || stops.front().v != instance.root || stops.back().v != instance.root) {
    return false;
  }
  const std::size_t m = instance.demands.size();
  constexpr Vertex kAboard = -1;
  constexpr Vertex kHome = -2;
  std::vector<Vertex> where(m);
  std::vector<int> set_downs(m, 0);
  std::vector<bool> acted(m, false);
  for (std::size_t i = 0; i < m; ++i) where[i] = instance.demands[i].s;
  std::vector<bool> seen(instance.metric.size(), false);
  std::int64_t load = 0;

  for (const auto& stop : stops) {
    if (!instance.metric.valid_vertex(stop.v)) return false;
    seen[static_cast<std::size_t>(stop.v)] = true;
    for (DemandId id : stop.drop) {
      if (id < 0 || static_cast<std::size_t>(id) >= m) return false;
      const auto i = static_cast<std::size_t>(id);
      if (where[i] != kAboard) return false;
      load -= instance.demands[i].w;
      if (stop.v == instance.demands[i].t) {
        where[i] = kHome;
      } else {
        if (++set_downs[i] > max_preemptions) return false;
        where[i] = stop.v;
      }
    }
    for (DemandId id : stop.pick) {
      if (id < 0 || static_cast<std::size_t>(id) >= m) return false;
      const auto i = static_cast<std::size_t>(id);
      if (where[i] != stop.v) return false;
      where[i] = kAboard;
      acted[i] = true;
      load += instance.demands[i].w;
      if (load > instance.capacity) return false;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (where[i] == kHome) continue;
    const auto& d = instance.demands[i];
    if (d.s == d.t && !acted[i] && seen[static_cast<std::size_t>(d.s)]) continue;
    return false;
  }
  return true;
}

}  // namespace kfdar::oracle
