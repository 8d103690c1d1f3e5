#include "kfdar/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kfdar/errors.hpp"

namespace kfdar {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void floyd_warshall(std::size_t n, std::vector<double>& d) {
  for (std::size_t l = 0; l < n; ++l) {
    const double* row_l = d.data() + l * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double d_il = d[i * n + l];
      if (d_il == kInf) continue;
      double* row_i = d.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double via = d_il + row_l[j];
        if (via < row_i[j]) row_i[j] = via;
      }
    }
  }
}

}  // namespace

Metric::Metric(std::size_t n, std::vector<double> dist)
    : n_(n), dist_(std::make_shared<const std::vector<double>>(std::move(dist))) {}

Metric Metric::from_matrix(std::size_t n, std::vector<double> dist) {
  if (dist.size() != n * n) {
    throw InvalidInstance("distance matrix has " + std::to_string(dist.size()) +
                          " entries, expected " + std::to_string(n * n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = dist[i * n + j];
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidInstance("distance entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") is negative or not finite");
      }
      if (i == j && v > kDistanceTolerance) {
        throw InvalidInstance("non-zero diagonal at " + std::to_string(i));
      }
      if (std::abs(v - dist[j * n + i]) > kDistanceTolerance) {
        throw InvalidInstance("asymmetric distances between " + std::to_string(i) + " and " +
                              std::to_string(j));
      }
    }
  }
  // Symmetrize exactly before checking the triangle inequality.
  for (std::size_t i = 0; i < n; ++i) {
    dist[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::min(dist[i * n + j], dist[j * n + i]);
      dist[i * n + j] = v;
      dist[j * n + i] = v;
    }
  }
  std::vector<double> closed = dist;
  floyd_warshall(n, closed);
  for (std::size_t i = 0; i < n * n; ++i) {
    if (dist[i] - closed[i] > kDistanceTolerance) {
      throw InvalidInstance("triangle inequality violated by " + std::to_string(dist[i] - closed[i]) +
                            " between " + std::to_string(i / n) + " and " + std::to_string(i % n));
    }
  }
  return Metric(n, std::move(closed));
}

Metric Metric::from_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw InvalidInstance("distance matrix is not square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return from_matrix(n, std::move(flat));
}

Metric Metric::from_trusted(std::size_t n, std::vector<double> dist) {
  return Metric(n, std::move(dist));
}

double Metric::max_distance() const {
  double best = 0.0;
  for (double v : *dist_) best = std::max(best, v);
  return best;
}

double Metric::min_positive_distance() const {
  double best = kInf;
  for (double v : *dist_) {
    if (v > kDistanceTolerance) best = std::min(best, v);
  }
  return best == kInf ? 0.0 : best;
}

Metric metric_from_points(std::span<const Point> points) {
  if (points.empty()) throw InvalidInstance("point list is empty");
  const std::size_t n = points.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  // Euclidean distances can miss the triangle inequality by an ulp.
  return close_matrix(n, std::move(d));
}

Metric metric_closure(std::size_t n, std::span<const WeightedEdge> edges) {
  std::vector<double> d(n * n, kInf);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n ||
        static_cast<std::size_t>(e.v) >= n) {
      throw InvalidInstance("edge endpoint out of range");
    }
    if (!(e.length >= 0.0) || !std::isfinite(e.length)) {
      throw InvalidInstance("edge length must be finite and non-negative");
    }
    const auto u = static_cast<std::size_t>(e.u);
    const auto v = static_cast<std::size_t>(e.v);
    d[u * n + v] = std::min(d[u * n + v], e.length);
    d[v * n + u] = std::min(d[v * n + u], e.length);
  }
  floyd_warshall(n, d);
  for (double v : d) {
    if (v == kInf) throw DisconnectedGraph("graph is not connected");
  }
  return Metric(n, std::move(d));
}

Metric close_matrix(std::size_t n, std::vector<double> dist) {
  floyd_warshall(n, dist);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::min(dist[i * n + j], dist[j * n + i]);
      dist[i * n + j] = v;
      dist[j * n + i] = v;
    }
  }
  return Metric(n, std::move(dist));
}

double max_triangle_violation(const Metric& metric) {
  const auto n = static_cast<Vertex>(metric.size());
  double worst = 0.0;
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex j = 0; j < n; ++j) {
      for (Vertex l = 0; l < n; ++l) {
        worst = std::max(worst, metric(i, j) - metric(i, l) - metric(l, j));
      }
    }
  }
  return worst;
}

ContractedMetric contract(const Metric& metric, std::span<const Vertex> super) {
  if (super.empty()) throw InvalidArgument("cannot contract an empty vertex set");
  const std::size_t n = metric.size();
  std::vector<bool> in_super(n, false);
  for (Vertex v : super) {
    if (!metric.valid_vertex(v)) throw InvalidArgument("contracted vertex out of range");
    in_super[static_cast<std::size_t>(v)] = true;
  }

  ContractedMetric out;
  out.image.assign(n, 0);
  out.groups.emplace_back();
  for (std::size_t v = 0; v < n; ++v) {
    if (in_super[v]) {
      out.groups[0].push_back(static_cast<Vertex>(v));
    } else {
      out.image[v] = static_cast<Vertex>(out.groups.size());
      out.groups.push_back({static_cast<Vertex>(v)});
    }
  }

  const std::size_t m = out.groups.size();
  std::vector<double> d(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      double best = kInf;
      for (Vertex u : out.groups[a]) {
        for (Vertex v : out.groups[b]) best = std::min(best, metric(u, v));
      }
      d[a * m + b] = best;
      d[b * m + a] = best;
    }
  }
  out.metric = close_matrix(m, std::move(d));
  return out;
}

}  // namespace kfdar
