#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "kfdar/metric.hpp"
#include "kfdar/tree.hpp"

namespace kfdar {

// kExact: branch-and-bound over vertex subsets, certified optimal.
// kHeuristic: best-over-roots greedy growth followed by leaf pruning; feasible
// but without a worst-case factor.
// kAuto: exact up to kExactKmstLimit vertices, heuristic beyond.
enum class KmstMode { kExact, kHeuristic, kAuto };

inline constexpr std::size_t kExactKmstLimit = 16;

// Minimum tree reaching a target total vertex weight, optionally forced to
// contain a root. Empty `weights` means every vertex weighs 1.
struct KmstQuery {
  Metric metric;
  std::optional<Vertex> root;
  std::int64_t target = 1;
  std::vector<std::int64_t> weights;
  KmstMode mode = KmstMode::kAuto;
};

// Solver bound to one metric. Reusable across many queries on that metric;
// nearest-neighbour tables for the heuristic are built on first use. Not
// thread-safe; give each thread its own instance.
class KmstSolver {
 public:
  explicit KmstSolver(Metric metric);
  ~KmstSolver();
  KmstSolver(KmstSolver&&) noexcept;
  KmstSolver& operator=(KmstSolver&&) noexcept;

  const Metric& metric() const { return metric_; }

  // Throws Infeasible when no vertex set containing the root reaches the
  // target, InvalidArgument on malformed input.
  TreeSolution solve(std::optional<Vertex> root, std::span<const std::int64_t> weights,
                     std::int64_t target, KmstMode mode = KmstMode::kAuto) const;

 private:
  struct NeighbourTable;

  TreeSolution solve_exact(std::optional<Vertex> root, std::span<const std::int64_t> weights,
                           std::int64_t target) const;
  TreeSolution solve_heuristic(std::optional<Vertex> root, std::span<const std::int64_t> weights,
                               std::int64_t target) const;
  const NeighbourTable& neighbours() const;

  Metric metric_;
  mutable std::unique_ptr<NeighbourTable> neighbours_;
};

TreeSolution kmst_solve(const KmstQuery& query);

// True iff `solution` is a valid tree meeting the query and no vertex subset
// meeting the target has a shorter spanning tree. Exhaustive; throws TooLarge
// above kExactKmstLimit vertices.
bool kmst_exact_certify(const KmstQuery& query, const TreeSolution& solution);

}  // namespace kfdar
