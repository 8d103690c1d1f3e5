#include "kfdar/kforest.hpp"

#include <algorithm>
#include <numeric>

#include "kfdar/errors.hpp"

namespace kfdar {
namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<DemandId> joined(const KForestInstance& instance, UnionFind& uf) {
  std::vector<DemandId> out;
  for (std::size_t i = 0; i < instance.demands.size(); ++i) {
    const auto& d = instance.demands[i];
    if (uf.find(static_cast<std::size_t>(d.s)) == uf.find(static_cast<std::size_t>(d.t))) {
      out.push_back(static_cast<DemandId>(i));
    }
  }
  return out;
}

}  // namespace

std::vector<DemandId> connected_pairs(const KForestInstance& instance,
                                      const std::vector<TreeSolution>& trees) {
  UnionFind uf(instance.metric.size());
  for (const auto& t : trees) {
    for (const auto& [u, v] : t.edges) uf.unite(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
  }
  return joined(instance, uf);
}

KForestSolution kforest_solve(const KForestInstance& instance, RatioAlgo algo,
                              const RatioOptions& options) {
  if (instance.k < 1) throw InvalidArgument("k must be at least 1");
  if (static_cast<std::size_t>(instance.k) > instance.demands.size()) {
    throw Infeasible("k exceeds the number of demands");
  }
  for (const auto& d : instance.demands) {
    if (!instance.metric.valid_vertex(d.s) || !instance.metric.valid_vertex(d.t)) {
      throw InvalidInstance("demand endpoint out of range");
    }
  }

  KForestSolution out;
  UnionFind uf(instance.metric.size());
  out.connected = joined(instance, uf);

  while (static_cast<int>(out.connected.size()) < instance.k) {
    std::vector<DemandId> residual;
    std::vector<bool> done(instance.demands.size(), false);
    for (DemandId id : out.connected) done[static_cast<std::size_t>(id)] = true;
    KForestInstance sub;
    sub.metric = instance.metric;
    for (std::size_t i = 0; i < instance.demands.size(); ++i) {
      if (done[i]) continue;
      residual.push_back(static_cast<DemandId>(i));
      sub.demands.push_back(instance.demands[i]);
    }
    const int need = instance.k - static_cast<int>(out.connected.size());
    sub.k = std::min<int>(need, static_cast<int>(sub.demands.size()));

    RatioSolution sol = ratio_solve(sub, algo, options);
    for (const auto& [u, v] : sol.tree.edges) {
      uf.unite(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    }
    out.length += sol.tree.length;
    out.trees.push_back(std::move(sol.tree));
    ++out.rounds;
    out.connected = joined(instance, uf);
  }
  return out;
}

}  // namespace kfdar
