#include "kfdar/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace kfdar {
namespace {

std::vector<Vertex> sorted_unique(std::span<const Vertex> vertices) {
  std::vector<Vertex> out(vertices.begin(), vertices.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TreeSolution mst_tree(const Metric& metric, std::span<const Vertex> vertices) {
  TreeSolution tree;
  tree.vertices = sorted_unique(vertices);
  const std::size_t k = tree.vertices.size();
  if (k <= 1) return tree;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> best(k, kInf);
  std::vector<std::size_t> parent(k, 0);
  std::vector<bool> done(k, false);
  best[0] = 0.0;
  for (std::size_t iter = 0; iter < k; ++iter) {
    std::size_t pick = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (!done[i] && (pick == k || best[i] < best[pick])) pick = i;
    }
    done[pick] = true;
    if (iter > 0) {
      tree.edges.emplace_back(tree.vertices[parent[pick]], tree.vertices[pick]);
      tree.length += best[pick];
    }
    const auto row = metric.row(tree.vertices[pick]);
    for (std::size_t i = 0; i < k; ++i) {
      if (done[i]) continue;
      const double d = row[static_cast<std::size_t>(tree.vertices[i])];
      if (d < best[i]) {
        best[i] = d;
        parent[i] = pick;
      }
    }
  }
  return tree;
}

double mst_length(const Metric& metric, std::span<const Vertex> vertices) {
  return mst_tree(metric, vertices).length;
}

bool is_valid_tree(const Metric& metric, const TreeSolution& tree) {
  const auto& vs = tree.vertices;
  if (!std::is_sorted(vs.begin(), vs.end())) return false;
  if (std::adjacent_find(vs.begin(), vs.end()) != vs.end()) return false;
  if (vs.empty()) return tree.edges.empty() && tree.length == 0.0;
  if (tree.edges.size() + 1 != vs.size()) return false;

  auto index_of = [&](Vertex v) -> std::ptrdiff_t {
    auto it = std::lower_bound(vs.begin(), vs.end(), v);
    if (it == vs.end() || *it != v) return -1;
    return it - vs.begin();
  };
  std::vector<std::size_t> root(vs.size());
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  double length = 0.0;
  for (const auto& [u, v] : tree.edges) {
    const auto a = index_of(u);
    const auto b = index_of(v);
    if (a < 0 || b < 0) return false;
    const auto ra = find(static_cast<std::size_t>(a));
    const auto rb = find(static_cast<std::size_t>(b));
    if (ra == rb) return false;
    root[ra] = rb;
    length += metric(u, v);
  }
  return std::abs(length - tree.length) <= 1e-6 * std::max(1.0, length);
}

std::vector<Vertex> preorder(const TreeSolution& tree, Vertex start) {
  std::map<Vertex, std::vector<Vertex>> adj;
  for (const auto& [u, v] : tree.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& [v, list] : adj) std::sort(list.begin(), list.end());

  std::vector<Vertex> order;
  std::map<Vertex, bool> seen;
  std::vector<Vertex> stack{start};
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = true;
    order.push_back(v);
    const auto& list = adj[v];
    for (auto it = list.rbegin(); it != list.rend(); ++it) {
      if (!seen[*it]) stack.push_back(*it);
    }
  }
  return order;
}

}  // namespace kfdar
