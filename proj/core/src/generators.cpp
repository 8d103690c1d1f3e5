#include "kfdar/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "kfdar/errors.hpp"

namespace kfdar {
namespace {

std::vector<Demand> random_demands(int n, int m, std::int64_t max_weight, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> vertex(0, n - 1);
  std::uniform_int_distribution<std::int64_t> weight(1, max_weight);
  std::vector<Demand> demands;
  demands.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    Demand d;
    d.s = vertex(rng);
    do {
      d.t = vertex(rng);
    } while (d.t == d.s);
    d.w = weight(rng);
    demands.push_back(d);
  }
  return demands;
}

}  // namespace

DialARideInstance gen_euclidean_random(int n_pairs, std::uint64_t seed) {
  if (n_pairs < 1) throw InvalidArgument("n_pairs must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::vector<Point> points(2 * static_cast<std::size_t>(n_pairs));
  for (auto& p : points) {
    p.x = coord(rng);
    p.y = coord(rng);
  }

  DialARideInstance inst;
  inst.metric = metric_from_points(points);
  for (int i = 0; i < n_pairs; ++i) inst.demands.push_back({2 * i, 2 * i + 1, 1});
  inst.capacity = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::sqrt(n_pairs)));
  while ((inst.capacity + 1) * (inst.capacity + 1) <= n_pairs) ++inst.capacity;
  while (inst.capacity * inst.capacity > n_pairs) --inst.capacity;

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = std::hypot(points[i].x, points[i].y);
    if (r < best) {
      best = r;
      inst.root = static_cast<Vertex>(i);
    }
  }
  inst.points = std::move(points);
  return inst;
}

Metric gen_random_metric(int n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("metric needs at least one vertex");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> length(1.0, 10.0);
  std::vector<WeightedEdge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) edges.push_back({u, v, length(rng)});
  }
  return metric_closure(static_cast<std::size_t>(n), edges);
}

KForestInstance gen_random_metric_instance(int n, int m, int k, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("need at least two vertices");
  if (k < 1 || k > m) throw InvalidArgument("need 1 <= k <= m");
  std::mt19937_64 rng(seed);
  KForestInstance inst;
  inst.metric = gen_random_metric(n, rng());
  inst.demands = random_demands(n, m, 1, rng);
  inst.k = k;
  return inst;
}

DialARideInstance gen_random_dar_instance(int n, int m, std::int64_t capacity,
                                          std::int64_t max_weight, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("need at least two vertices");
  if (capacity < 1 || max_weight < 1 || max_weight > capacity) {
    throw InvalidArgument("need 1 <= max_weight <= capacity");
  }
  std::mt19937_64 rng(seed);
  DialARideInstance inst;
  inst.metric = gen_random_metric(n, rng());
  inst.demands = random_demands(n, m, max_weight, rng);
  inst.capacity = capacity;
  inst.root = std::uniform_int_distribution<int>(0, n - 1)(rng);
  return inst;
}

DialARideInstance gen_line_instance(int n, int m, std::int64_t capacity, std::int64_t max_weight,
                                    std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("need at least two vertices");
  if (capacity < 1 || max_weight < 1 || max_weight > capacity) {
    throw InvalidArgument("need 1 <= max_weight <= capacity");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::vector<Point> points(static_cast<std::size_t>(n));
  for (auto& p : points) p.x = coord(rng);

  DialARideInstance inst;
  inst.metric = metric_from_points(points);
  inst.demands = random_demands(n, m, max_weight, rng);
  inst.capacity = capacity;
  inst.root = std::uniform_int_distribution<int>(0, n - 1)(rng);
  inst.points = std::move(points);
  return inst;
}

}  // namespace kfdar
