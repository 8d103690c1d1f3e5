#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace kfdar {

using Vertex = int;

inline constexpr double kDistanceTolerance = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct WeightedEdge {
  Vertex u = 0;
  Vertex v = 0;
  double length = 0.0;
};

// A finite metric space over vertices 0..n-1, stored as a dense distance
// matrix. Immutable; copies share storage.
class Metric {
 public:
  Metric() = default;

  // Validates a full distance matrix. Triangle violations up to
  // kDistanceTolerance are repaired by closure, larger ones are rejected with
  // InvalidInstance, as are negative, non-finite or asymmetric entries.
  static Metric from_matrix(std::size_t n, std::vector<double> dist);
  static Metric from_matrix(const std::vector<std::vector<double>>& rows);
  // No validation; for matrices derived from an existing metric that satisfy
  // the invariants by construction.
  static Metric from_trusted(std::size_t n, std::vector<double> dist);

  std::size_t size() const { return n_; }
  double operator()(Vertex u, Vertex v) const {
    return (*dist_)[static_cast<std::size_t>(u) * n_ + static_cast<std::size_t>(v)];
  }
  std::span<const double> row(Vertex u) const {
    return {dist_->data() + static_cast<std::size_t>(u) * n_, n_};
  }
  std::span<const double> data() const { return *dist_; }

  bool valid_vertex(Vertex v) const { return v >= 0 && static_cast<std::size_t>(v) < n_; }

  // Largest and smallest strictly positive distances; 0 when none exist.
  double max_distance() const;
  double min_positive_distance() const;

 private:
  friend Metric metric_closure(std::size_t, std::span<const WeightedEdge>);
  friend Metric close_matrix(std::size_t, std::vector<double>);
  Metric(std::size_t n, std::vector<double> dist);

  std::size_t n_ = 0;
  std::shared_ptr<const std::vector<double>> dist_ = std::make_shared<const std::vector<double>>();
};

Metric metric_from_points(std::span<const Point> points);

// All-pairs shortest paths of an undirected graph. Throws DisconnectedGraph
// when some pair is unreachable and InvalidInstance on negative lengths.
Metric metric_closure(std::size_t n, std::span<const WeightedEdge> edges);

// Floyd-Warshall over a dense symmetric matrix with zero diagonal; no
// connectivity requirement beyond finiteness of the input.
Metric close_matrix(std::size_t n, std::vector<double> dist);

// Largest triangle-inequality violation max(d[i][j] - d[i][l] - d[l][j], 0)
// over all triples; O(n^3).
double max_triangle_violation(const Metric& metric);

// Result of shrinking a vertex set to a single supernode. Vertex 0 of the new
// metric is the supernode; the rest keep their relative order.
struct ContractedMetric {
  Metric metric;
  Vertex supernode = 0;
  // groups[v] lists the original vertices merged into new vertex v.
  std::vector<std::vector<Vertex>> groups;
  // Original vertex -> new vertex.
  std::vector<Vertex> image;
};

// Supernode distance to v is min over u in `super` of d(u, v); the result is
// re-closed so the triangle inequality holds again.
ContractedMetric contract(const Metric& metric, std::span<const Vertex> super);

}  // namespace kfdar
