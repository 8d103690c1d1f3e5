#include "kfdar/ratio.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "kfdar/errors.hpp"

namespace kfdar {
namespace {

struct Candidate {
  RatioSolution solution;
  bool valid = false;
};

// Strictly better: smaller ratio beyond tolerance, or tied and a
// lexicographically smaller covered set.
bool improves(const RatioSolution& cand, const Candidate& best) {
  if (!best.valid) return true;
  const double a = cand.ratio;
  const double b = best.solution.ratio;
  if (a < b - kDistanceTolerance) return true;
  if (a > b + kDistanceTolerance) return false;
  return cand.covered < best.solution.covered;
}

void offer(Candidate& best, RatioSolution cand) {
  if (improves(cand, best)) {
    best.solution = std::move(cand);
    best.valid = true;
  }
}

int clamp_cap(const KForestInstance& instance) {
  if (instance.demands.empty()) throw Infeasible("no demands to cover");
  if (instance.k < 1) throw InvalidArgument("k must be at least 1");
  return std::min<int>(instance.k, static_cast<int>(instance.demands.size()));
}

bool geometric(const KForestInstance& instance, const RatioOptions& options) {
  switch (options.grid) {
    case GuessGrid::kExhaustive:
      return false;
    case GuessGrid::kGeometric:
      return true;
    case GuessGrid::kAuto:
      break;
  }
  return instance.demands.size() > options.exhaustive_limit;
}

// Builds a solution from a vertex set: MST over the set, covered = demands
// inside it (lowest ids first, at most `cap`). Empty covered -> no solution.
std::optional<RatioSolution> from_vertices(const KForestInstance& instance,
                                           std::vector<Vertex> vertices, int cap,
                                           RatioAlgo algo, const GuessState& guess) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  auto covered = demands_inside(instance.demands, vertices);
  if (covered.empty()) return std::nullopt;
  if (static_cast<int>(covered.size()) > cap) covered.resize(static_cast<std::size_t>(cap));
  RatioSolution sol;
  sol.tree = mst_tree(instance.metric, vertices);
  sol.tree.covered_weight = static_cast<std::int64_t>(covered.size());
  sol.covered = std::move(covered);
  sol.ratio = sol.tree.length / static_cast<double>(sol.covered.size());
  sol.algo = algo;
  sol.guess = guess;
  return sol;
}

// Candidate values for the largest admitted pair distance. Geometric mode
// keeps, per factor-2 band above the smallest positive value, the largest
// value inside the band; every true value then has a kept value within a
// factor 2 above it.
std::vector<double> distance_grid(const KForestInstance& instance, bool geo) {
  std::vector<double> values;
  for (const auto& d : instance.demands) values.push_back(instance.metric(d.s, d.t));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (!geo || values.size() <= 2) return values;

  std::vector<double> kept;
  std::size_t i = 0;
  while (i < values.size() && values[i] <= kDistanceTolerance) kept.push_back(values[i++]);
  if (i == values.size()) return kept;
  double limit = values[i];
  while (i < values.size()) {
    while (i < values.size() && values[i] <= limit) ++i;
    kept.push_back(values[i - 1]);
    limit *= 2.0;
  }
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  return kept;
}

std::vector<int> count_grid(int cap, bool geo) {
  std::vector<int> out;
  if (!geo) {
    for (int v = 1; v <= cap; ++v) out.push_back(v);
    return out;
  }
  for (int v = 1; v < cap; v *= 2) out.push_back(v);
  out.push_back(cap);
  return out;
}

int isqrt(int q) {
  int r = static_cast<int>(std::sqrt(static_cast<double>(q)));
  while (r * r > q) --r;
  while ((r + 1) * (r + 1) <= q) ++r;
  return r;
}

// Shared state for one instance: the demand metric and its k-MST solver.
class SqrtKRunner {
 public:
  SqrtKRunner(const KForestInstance& instance, const RatioOptions& options)
      : instance_(instance),
        options_(options),
        solver_(demand_metric(instance.metric, instance.demands)) {
    pair_distance_.reserve(instance.demands.size());
    for (const auto& d : instance.demands) {
      pair_distance_.push_back(instance.metric(d.s, d.t));
    }
  }

  std::optional<SqrtKCandidate> run(int pairs, double max_pair_distance) const {
    const int cap = clamp_cap(instance_);
    if (pairs < 1) throw InvalidArgument("guessed pair count must be positive");
    const int p = isqrt(pairs);
    const std::size_t m = instance_.demands.size();
    std::vector<std::int64_t> weights(m, 0);
    std::int64_t surviving = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (pair_distance_[i] <= max_pair_distance + kDistanceTolerance) {
        weights[i] = 1;
        ++surviving;
      }
    }
    if (surviving < p) return std::nullopt;

    const TreeSolution demand_tree = solver_.solve(std::nullopt, weights, p, options_.kmst_mode);

    // The tree on demands maps to a source tree and a sink tree; they are
    // joined through the cheapest covered demand. The union is spanned by an
    // MST over the endpoints, which is never longer than l(T) + d(e).
    std::vector<DemandId> admitted;
    std::vector<Vertex> vertices;
    for (Vertex i : demand_tree.vertices) {
      const auto& d = instance_.demands[static_cast<std::size_t>(i)];
      vertices.push_back(d.s);
      vertices.push_back(d.t);
      if (weights[static_cast<std::size_t>(i)] > 0) admitted.push_back(i);
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    admitted.resize(std::min<std::size_t>(admitted.size(), static_cast<std::size_t>(p)));

    SqrtKCandidate out;
    out.demand_tree_length = demand_tree.length;
    RatioSolution& sol = out.solution;
    sol.tree = mst_tree(instance_.metric, vertices);
    sol.covered = std::move(admitted);
    if (static_cast<int>(sol.covered.size()) > cap) {
      sol.covered.resize(static_cast<std::size_t>(cap));
    }
    sol.tree.covered_weight = static_cast<std::int64_t>(sol.covered.size());
    sol.ratio = sol.tree.length / static_cast<double>(sol.covered.size());
    sol.algo = RatioAlgo::kSqrtK;
    sol.guess.pairs = pairs;
    sol.guess.max_pair_distance = max_pair_distance;
    return out;
  }

 private:
  const KForestInstance& instance_;
  const RatioOptions& options_;
  KmstSolver solver_;
  std::vector<double> pair_distance_;
};

// Doubling grid for the optimum length: 0 and powers of 2 times the smallest
// positive distance, up to n times the largest.
std::vector<double> length_grid(const Metric& metric) {
  std::vector<double> grid{0.0};
  const double lo = metric.min_positive_distance();
  if (lo <= 0.0) return grid;
  const double hi = static_cast<double>(metric.size()) * metric.max_distance();
  for (double b = lo;; b *= 2.0) {
    grid.push_back(b);
    if (b >= hi) break;
  }
  return grid;
}

}  // namespace

Metric demand_metric(const Metric& metric, std::span<const Demand> demands) {
  const std::size_t m = demands.size();
  std::vector<double> dist(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v = metric(demands[i].s, demands[j].s) + metric(demands[i].t, demands[j].t);
      dist[i * m + j] = v;
      dist[j * m + i] = v;
    }
  }
  // A sum of two metrics is a metric.
  return Metric::from_trusted(m, std::move(dist));
}

std::vector<DemandId> demands_inside(std::span<const Demand> demands,
                                     std::span<const Vertex> vertices) {
  std::vector<DemandId> out;
  for (std::size_t i = 0; i < demands.size(); ++i) {
    if (std::binary_search(vertices.begin(), vertices.end(), demands[i].s) &&
        std::binary_search(vertices.begin(), vertices.end(), demands[i].t)) {
      out.push_back(static_cast<DemandId>(i));
    }
  }
  return out;
}

std::optional<SqrtKCandidate> sqrt_k_guess(const KForestInstance& instance, int pairs,
                                           double max_pair_distance,
                                           const RatioOptions& options) {
  clamp_cap(instance);
  return SqrtKRunner(instance, options).run(pairs, max_pair_distance);
}

RatioSolution ratio_sqrt_k(const KForestInstance& instance, const RatioOptions& options) {
  const int cap = clamp_cap(instance);
  const bool geo = geometric(instance, options);
  SqrtKRunner runner(instance, options);

  // Only floor(sqrt(q)) reaches the k-MST, so one q per distinct root.
  std::map<int, int> pairs_for_root;
  for (int q = 1; q <= cap; ++q) pairs_for_root.emplace(isqrt(q), q);

  Candidate best;
  for (double dmax : distance_grid(instance, geo)) {
    for (const auto& [p, q] : pairs_for_root) {
      auto cand = runner.run(q, dmax);
      if (cand) offer(best, std::move(cand->solution));
    }
  }
  if (!best.valid) throw Infeasible("no guess produced a tree");
  return best.solution;
}

RatioSolution ratio_sqrt_n(const KForestInstance& instance, const RatioOptions& options) {
  const int cap = clamp_cap(instance);
  const bool geo = geometric(instance, options);
  const Metric& metric = instance.metric;
  const auto n = static_cast<Vertex>(metric.size());
  KmstSolver solver(metric);
  Candidate best;

  // High-degree case: weight u by the demands joining it to w, grow a tree
  // rooted at w. Depends only on (w, degree).
  const auto degrees = count_grid(cap, geo);
  for (Vertex w = 0; w < n; ++w) {
    std::vector<std::int64_t> weights(metric.size(), 0);
    for (const auto& d : instance.demands) {
      if (d.s == w) ++weights[static_cast<std::size_t>(d.t)];
      else if (d.t == w) ++weights[static_cast<std::size_t>(d.s)];
    }
    std::int64_t total = 0;
    for (auto x : weights) total += x;
    for (int delta : degrees) {
      if (total < delta) break;
      const TreeSolution h = solver.solve(w, weights, delta, options.kmst_mode);
      GuessState g;
      g.degree = delta;
      g.hub = w;
      g.high_degree = true;
      auto sol = from_vertices(instance, h.vertices, cap, RatioAlgo::kSqrtN, g);
      if (sol) offer(best, std::move(*sol));
    }
  }

  // Low-degree case: from w, repeatedly contract the current tree and attach
  // t more vertices. The length guess only decides how many steps are kept,
  // so each (w, t) sequence is computed once and cut per guess.
  std::set<int> steps_sizes;
  for (int q : count_grid(cap, geo)) {
    for (int delta = 1; delta <= q; ++delta) steps_sizes.insert(std::max(1, q / (2 * delta)));
  }
  const auto lengths = length_grid(metric);
  for (Vertex w = 0; w < n; ++w) {
    for (int t : steps_sizes) {
      std::vector<Vertex> current{w};
      std::vector<std::vector<Vertex>> prefixes;
      std::vector<double> step_length;
      while (current.size() < metric.size()) {
        const auto cm = contract(metric, current);
        std::vector<std::int64_t> weights(cm.metric.size(), 1);
        weights[0] = 0;
        const auto remaining = static_cast<std::int64_t>(cm.metric.size() - 1);
        KmstSolver local(cm.metric);
        const TreeSolution step =
            local.solve(cm.supernode, weights, std::min<std::int64_t>(t, remaining),
                        options.kmst_mode);
        for (Vertex v : step.vertices) {
          if (v != cm.supernode) current.push_back(cm.groups[static_cast<std::size_t>(v)][0]);
        }
        step_length.push_back(step.length);
        prefixes.push_back(current);
      }
      std::size_t last = static_cast<std::size_t>(-1);
      for (double b : lengths) {
        std::size_t keep = 0;
        while (keep < step_length.size() && step_length[keep] <= 4.0 * b + kDistanceTolerance) {
          ++keep;
        }
        if (keep == 0 || keep == last) continue;
        last = keep;
        GuessState g;
        g.length_scale = b;
        g.hub = w;
        g.new_vertices = t;
        auto sol = from_vertices(instance, prefixes[keep - 1], cap, RatioAlgo::kSqrtN, g);
        if (sol) offer(best, std::move(*sol));
      }
    }
  }

  if (!best.valid) throw Infeasible("no guess produced a tree");
  return best.solution;
}

RatioSolution ratio_best(const KForestInstance& instance, const RatioOptions& options) {
  RatioSolution a = ratio_sqrt_k(instance, options);
  RatioSolution b = ratio_sqrt_n(instance, options);
  return b.ratio < a.ratio - kDistanceTolerance ? b : a;
}

RatioSolution ratio_solve(const KForestInstance& instance, RatioAlgo algo,
                          const RatioOptions& options) {
  switch (algo) {
    case RatioAlgo::kSqrtK:
      return ratio_sqrt_k(instance, options);
    case RatioAlgo::kSqrtN:
      return ratio_sqrt_n(instance, options);
    case RatioAlgo::kBest:
      break;
  }
  return ratio_best(instance, options);
}

double ratio_sqrt_k_factor(int cap, double alpha) {
  return 18.0 * alpha * std::sqrt(static_cast<double>(cap));
}

double ratio_sqrt_n_factor(std::size_t n, double alpha) {
  return 16.0 * alpha * std::sqrt(static_cast<double>(n));
}

double ratio_best_factor(int cap, std::size_t n, double alpha) {
  return std::min(ratio_sqrt_k_factor(cap, alpha), ratio_sqrt_n_factor(n, alpha));
}

double ratio_factor(RatioAlgo algo, int cap, std::size_t n, double alpha) {
  switch (algo) {
    case RatioAlgo::kSqrtK:
      return ratio_sqrt_k_factor(cap, alpha);
    case RatioAlgo::kSqrtN:
      return ratio_sqrt_n_factor(n, alpha);
    case RatioAlgo::kBest:
      break;
  }
  return ratio_best_factor(cap, n, alpha);
}

bool verify_ratio_solution(const KForestInstance& instance, const RatioSolution& solution) {
  if (solution.covered.empty()) return false;
  if (static_cast<int>(solution.covered.size()) > std::max(instance.k, 1)) return false;
  if (!std::is_sorted(solution.covered.begin(), solution.covered.end())) return false;
  if (std::adjacent_find(solution.covered.begin(), solution.covered.end()) !=
      solution.covered.end()) {
    return false;
  }
  if (!is_valid_tree(instance.metric, solution.tree)) return false;
  const auto& vs = solution.tree.vertices;
  for (DemandId id : solution.covered) {
    if (id < 0 || static_cast<std::size_t>(id) >= instance.demands.size()) return false;
    const auto& d = instance.demands[static_cast<std::size_t>(id)];
    if (!std::binary_search(vs.begin(), vs.end(), d.s) ||
        !std::binary_search(vs.begin(), vs.end(), d.t)) {
      return false;
    }
  }
  const double expect = solution.tree.length / static_cast<double>(solution.covered.size());
  return std::abs(expect - solution.ratio) <= kDistanceTolerance * std::max(1.0, expect);
}

MonotoneSubsequence monotone_subsequence(std::span<const int> perm) {
  const std::size_t q = perm.size();
  std::vector<bool> seen(q + 1, false);
  for (int v : perm) {
    if (v < 1 || static_cast<std::size_t>(v) > q || seen[static_cast<std::size_t>(v)]) {
      throw InvalidArgument("input is not a permutation of 1..q");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }

  // Patience sorting with predecessor links; sign flips the direction.
  auto longest = [&](int sign) {
    std::vector<std::size_t> tails;  // positions
    std::vector<std::size_t> prev(q, q);
    for (std::size_t i = 0; i < q; ++i) {
      const int v = sign * perm[i];
      auto it = std::lower_bound(tails.begin(), tails.end(), v,
                                 [&](std::size_t pos, int x) { return sign * perm[pos] < x; });
      if (it != tails.begin()) prev[i] = *(it - 1);
      if (it == tails.end()) tails.push_back(i);
      else *it = i;
    }
    std::vector<std::size_t> out;
    if (tails.empty()) return out;
    for (std::size_t i = tails.back(); i != q; i = prev[i]) out.push_back(i);
    std::reverse(out.begin(), out.end());
    return out;
  };

  MonotoneSubsequence inc{longest(1), true};
  MonotoneSubsequence dec{longest(-1), false};
  return dec.indices.size() > inc.indices.size() ? dec : inc;
}

}  // namespace kfdar
