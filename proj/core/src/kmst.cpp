#include "kfdar/kmst.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "kfdar/errors.hpp"

namespace kfdar {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kExactHardLimit = 22;
constexpr std::size_t kNeighbourListSize = 48;

// Strictly better: shorter beyond tolerance, or tied and lexicographically
// smaller vertex set.
bool better(double length, const std::vector<Vertex>& set, double best_length,
            const std::vector<Vertex>& best_set) {
  if (length < best_length - kDistanceTolerance) return true;
  if (length > best_length + kDistanceTolerance) return false;
  return best_set.empty() || set < best_set;
}

std::int64_t weight_of(std::span<const std::int64_t> weights, Vertex v) {
  return weights.empty() ? 1 : weights[static_cast<std::size_t>(v)];
}

std::int64_t total_weight(std::span<const std::int64_t> weights, std::size_t n) {
  if (weights.empty()) return static_cast<std::int64_t>(n);
  return std::accumulate(weights.begin(), weights.end(), std::int64_t{0});
}

TreeSolution finish(const Metric& metric, std::span<const Vertex> vertices,
                    std::span<const std::int64_t> weights) {
  TreeSolution tree = mst_tree(metric, vertices);
  for (Vertex v : tree.vertices) tree.covered_weight += weight_of(weights, v);
  return tree;
}

}  // namespace

struct KmstSolver::NeighbourTable {
  // nearest[v] holds up to kNeighbourListSize other vertices by (distance, id).
  std::vector<std::vector<Vertex>> nearest;
  bool complete = false;  // lists hold every other vertex
};

KmstSolver::KmstSolver(Metric metric) : metric_(std::move(metric)) {}
KmstSolver::~KmstSolver() = default;
KmstSolver::KmstSolver(KmstSolver&&) noexcept = default;
KmstSolver& KmstSolver::operator=(KmstSolver&&) noexcept = default;

const KmstSolver::NeighbourTable& KmstSolver::neighbours() const {
  if (neighbours_) return *neighbours_;
  auto table = std::make_unique<NeighbourTable>();
  const auto n = static_cast<Vertex>(metric_.size());
  const std::size_t keep = std::min<std::size_t>(kNeighbourListSize, metric_.size() - 1);
  table->complete = keep + 1 == metric_.size();
  table->nearest.resize(metric_.size());
  std::vector<Vertex> all;
  for (Vertex u = 0; u < n; ++u) {
    all.clear();
    for (Vertex v = 0; v < n; ++v) {
      if (v != u) all.push_back(v);
    }
    const auto row = metric_.row(u);
    auto closer = [&](Vertex a, Vertex b) {
      const double da = row[static_cast<std::size_t>(a)];
      const double db = row[static_cast<std::size_t>(b)];
      return da < db || (da == db && a < b);
    };
    if (keep < all.size()) {
      std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                       closer);
      all.resize(keep);
    }
    std::sort(all.begin(), all.end(), closer);
    table->nearest[static_cast<std::size_t>(u)] = all;
  }
  neighbours_ = std::move(table);
  return *neighbours_;
}

TreeSolution KmstSolver::solve(std::optional<Vertex> root, std::span<const std::int64_t> weights,
                               std::int64_t target, KmstMode mode) const {
  const std::size_t n = metric_.size();
  if (n == 0) throw InvalidArgument("k-MST on an empty metric");
  if (!weights.empty() && weights.size() != n) {
    throw InvalidArgument("weight vector does not match the metric size");
  }
  if (std::any_of(weights.begin(), weights.end(), [](std::int64_t w) { return w < 0; })) {
    throw InvalidArgument("vertex weights must be non-negative");
  }
  if (root && !metric_.valid_vertex(*root)) throw InvalidArgument("k-MST root out of range");
  if (target < 1) throw InvalidArgument("k-MST target must be positive");
  if (total_weight(weights, n) < target) {
    throw Infeasible("k-MST target " + std::to_string(target) + " exceeds total weight");
  }

  if (mode == KmstMode::kAuto) mode = n <= kExactKmstLimit ? KmstMode::kExact : KmstMode::kHeuristic;
  return mode == KmstMode::kExact ? solve_exact(root, weights, target)
                                  : solve_heuristic(root, weights, target);
}

TreeSolution KmstSolver::solve_exact(std::optional<Vertex> root,
                                     std::span<const std::int64_t> weights,
                                     std::int64_t target) const {
  const std::size_t n = metric_.size();
  if (n > kExactHardLimit) {
    throw TooLarge("exact k-MST limited to " + std::to_string(kExactHardLimit) + " vertices");
  }

  std::vector<std::int64_t> suffix(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) {
    const bool forced = root && static_cast<std::size_t>(*root) == i;
    suffix[i] = suffix[i + 1] + (forced ? 0 : weight_of(weights, static_cast<Vertex>(i)));
  }

  double best_length = kInf;
  std::vector<Vertex> best_set;
  std::vector<Vertex> chosen;
  std::int64_t chosen_weight = 0;
  if (root) {
    chosen.push_back(*root);
    chosen_weight = weight_of(weights, *root);
  }

  // Include/exclude DFS in vertex order. Any tree on a superset of `chosen`
  // costs at least half the MST of `chosen` (Steiner ratio), which bounds
  // the subtree.
  auto dfs = [&](auto&& self, std::size_t i) -> void {
    std::vector<Vertex> sorted = chosen;
    std::sort(sorted.begin(), sorted.end());
    const double span = chosen.empty() ? 0.0 : mst_length(metric_, sorted);
    if (chosen_weight >= target && better(span, sorted, best_length, best_set)) {
      best_length = span;
      best_set = sorted;
    }
    if (span / 2.0 > best_length + kDistanceTolerance) return;
    for (std::size_t v = i; v < n; ++v) {
      if (root && static_cast<std::size_t>(*root) == v) continue;
      if (chosen_weight < target && chosen_weight + suffix[v] < target) return;
      chosen.push_back(static_cast<Vertex>(v));
      chosen_weight += weight_of(weights, static_cast<Vertex>(v));
      self(self, v + 1);
      chosen_weight -= weight_of(weights, static_cast<Vertex>(v));
      chosen.pop_back();
    }
  };
  dfs(dfs, 0);

  if (best_set.empty()) throw Infeasible("k-MST target unreachable");
  return finish(metric_, best_set, weights);
}

TreeSolution KmstSolver::solve_heuristic(std::optional<Vertex> root,
                                         std::span<const std::int64_t> weights,
                                         std::int64_t target) const {
  const std::size_t n = metric_.size();
  const bool unit = std::all_of(weights.begin(), weights.end(),
                                [](std::int64_t w) { return w == 0 || w == 1; });

  std::vector<Vertex> roots;
  if (root) {
    roots.push_back(*root);
  } else {
    for (std::size_t v = 0; v < n; ++v) {
      if (weight_of(weights, static_cast<Vertex>(v)) > 0) roots.push_back(static_cast<Vertex>(v));
    }
  }

  std::vector<int> stamp(n, -1);
  std::vector<double> attach(n);
  std::vector<Vertex> parent(n);
  std::vector<std::size_t> cursor(n);
  double best_length = kInf;
  std::vector<Vertex> best_set;

  for (std::size_t ri = 0; ri < roots.size(); ++ri) {
    const int tag = static_cast<int>(ri);
    const Vertex r = roots[ri];
    std::vector<Vertex> tree{r};
    stamp[static_cast<std::size_t>(r)] = tag;
    std::int64_t weight = weight_of(weights, r);
    bool stuck = false;

    if (unit) {
      // Zero-weight vertices are never attached, so growth is Prim's rule
      // restricted to weight-1 vertices, driven by nearest-neighbour lists.
      const auto& table = neighbours();
      cursor[static_cast<std::size_t>(r)] = 0;
      auto usable = [&](Vertex v) {
        return stamp[static_cast<std::size_t>(v)] != tag && weight_of(weights, v) > 0;
      };
      while (weight < target) {
        double best_d = kInf;
        Vertex best_v = -1;
        Vertex best_u = -1;
        for (Vertex u : tree) {
          const auto& list = table.nearest[static_cast<std::size_t>(u)];
          auto& c = cursor[static_cast<std::size_t>(u)];
          while (c < list.size() && !usable(list[c])) ++c;
          Vertex cand = -1;
          if (c < list.size()) {
            cand = list[c];
          } else if (!table.complete) {
            for (std::size_t v = 0; v < n; ++v) {
              const auto vv = static_cast<Vertex>(v);
              if (!usable(vv)) continue;
              if (cand < 0 || metric_(u, vv) < metric_(u, cand)) cand = vv;
            }
          }
          if (cand < 0) continue;
          const double d = metric_(u, cand);
          if (d < best_d || (d == best_d && cand < best_v)) {
            best_d = d;
            best_v = cand;
            best_u = u;
          }
        }
        if (best_v < 0) {
          stuck = true;
          break;
        }
        stamp[static_cast<std::size_t>(best_v)] = tag;
        parent[static_cast<std::size_t>(best_v)] = best_u;
        cursor[static_cast<std::size_t>(best_v)] = 0;
        tree.push_back(best_v);
        weight += 1;
      }
    } else {
      for (std::size_t v = 0; v < n; ++v) {
        attach[v] = metric_(r, static_cast<Vertex>(v));
        parent[v] = r;
      }
      while (weight < target) {
        double best_score = kInf;
        Vertex best_v = -1;
        for (std::size_t v = 0; v < n; ++v) {
          const auto w = weight_of(weights, static_cast<Vertex>(v));
          if (stamp[v] == tag || w == 0) continue;
          const double score = attach[v] / static_cast<double>(w);
          if (score < best_score) {
            best_score = score;
            best_v = static_cast<Vertex>(v);
          }
        }
        if (best_v < 0) {
          stuck = true;
          break;
        }
        stamp[static_cast<std::size_t>(best_v)] = tag;
        tree.push_back(best_v);
        weight += weight_of(weights, best_v);
        const auto row = metric_.row(best_v);
        for (std::size_t v = 0; v < n; ++v) {
          if (stamp[v] != tag && row[v] < attach[v]) {
            attach[v] = row[v];
            parent[v] = best_v;
          }
        }
      }
    }
    if (stuck) continue;

    // Prune leaves (longest attachment edge first) while the target holds.
    std::vector<int> children(n, 0);
    std::vector<bool> removed(n, false);
    for (std::size_t i = 1; i < tree.size(); ++i) {
      ++children[static_cast<std::size_t>(parent[static_cast<std::size_t>(tree[i])])];
    }
    for (;;) {
      Vertex leaf = -1;
      double leaf_len = -1.0;
      for (std::size_t i = 1; i < tree.size(); ++i) {
        const Vertex v = tree[i];
        const auto vi = static_cast<std::size_t>(v);
        if (removed[vi] || children[vi] > 0) continue;
        if (weight - weight_of(weights, v) < target) continue;
        const double len = metric_(v, parent[vi]);
        if (len > leaf_len) {
          leaf_len = len;
          leaf = v;
        }
      }
      if (leaf < 0) break;
      removed[static_cast<std::size_t>(leaf)] = true;
      --children[static_cast<std::size_t>(parent[static_cast<std::size_t>(leaf)])];
      weight -= weight_of(weights, leaf);
    }
    std::vector<Vertex> kept;
    for (Vertex v : tree) {
      if (!removed[static_cast<std::size_t>(v)]) kept.push_back(v);
    }
    std::sort(kept.begin(), kept.end());
    const double length = mst_length(metric_, kept);
    if (better(length, kept, best_length, best_set)) {
      best_length = length;
      best_set = std::move(kept);
    }
  }

  if (best_set.empty()) throw Infeasible("k-MST target unreachable");
  return finish(metric_, best_set, weights);
}

TreeSolution kmst_solve(const KmstQuery& query) {
  return KmstSolver(query.metric).solve(query.root, query.weights, query.target, query.mode);
}

bool kmst_exact_certify(const KmstQuery& query, const TreeSolution& solution) {
  const std::size_t n = query.metric.size();
  if (n > kExactKmstLimit) {
    throw TooLarge("certification limited to " + std::to_string(kExactKmstLimit) + " vertices");
  }
  if (!is_valid_tree(query.metric, solution)) return false;
  std::int64_t weight = 0;
  for (Vertex v : solution.vertices) {
    if (!query.metric.valid_vertex(v)) return false;
    weight += weight_of(query.weights, v);
  }
  if (weight < query.target) return false;
  if (query.root && !std::binary_search(solution.vertices.begin(), solution.vertices.end(),
                                        *query.root)) {
    return false;
  }

  std::vector<Vertex> subset;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (query.root && !(mask & (1u << *query.root))) continue;
    subset.clear();
    std::int64_t w = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask & (1u << v)) {
        subset.push_back(static_cast<Vertex>(v));
        w += weight_of(query.weights, static_cast<Vertex>(v));
      }
    }
    if (w < query.target) continue;
    if (mst_length(query.metric, subset) < solution.length - kDistanceTolerance) return false;
  }
  return true;
}

}  // namespace kfdar
