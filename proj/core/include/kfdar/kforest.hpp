#pragma once

#include <vector>

#include "kfdar/instance.hpp"
#include "kfdar/ratio.hpp"
#include "kfdar/tree.hpp"

namespace kfdar {

struct KForestSolution {
  std::vector<TreeSolution> trees;
  std::vector<DemandId> connected;  // sorted; pairs joined by the union of the trees
  double length = 0.0;              // sum of tree lengths
  int rounds = 0;
};

// Greedy covering by minimum-ratio trees until at least k pairs are
// connected. Degenerate demands count as connected from the start. Throws
// Infeasible when k exceeds the number of demands.
KForestSolution kforest_solve(const KForestInstance& instance, RatioAlgo algo = RatioAlgo::kBest,
                              const RatioOptions& options = {});

// Pairs whose endpoints share a component of the union of `trees`.
std::vector<DemandId> connected_pairs(const KForestInstance& instance,
                                      const std::vector<TreeSolution>& trees);

}  // namespace kfdar
