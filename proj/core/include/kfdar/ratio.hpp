#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kfdar/instance.hpp"
#include "kfdar/kmst.hpp"
#include "kfdar/tree.hpp"

namespace kfdar {

enum class RatioAlgo { kBest, kSqrtK, kSqrtN };

// kExhaustive tries every candidate value of each guessed parameter.
// kGeometric keeps one candidate per factor-2 band for the pair-distance
// guess, which loses at most a factor 2 in the guarantee.
// kAuto is exhaustive up to RatioOptions::exhaustive_limit demands.
enum class GuessGrid { kAuto, kExhaustive, kGeometric };

struct RatioOptions {
  KmstMode kmst_mode = KmstMode::kAuto;
  GuessGrid grid = GuessGrid::kAuto;
  std::size_t exhaustive_limit = 128;
};

// The guessed parameters that produced a solution. Fields a given algorithm
// does not guess stay at their defaults.
struct GuessState {
  int pairs = 0;                   // guessed number of pairs in the optimum
  double max_pair_distance = 0.0;  // largest d(s_i, t_i) admitted
  double length_scale = 0.0;       // optimum length within a factor 2
  int degree = 0;                  // most optimum demands at one vertex
  Vertex hub = -1;                 // vertex carrying that degree
  int new_vertices = 0;            // growth step size of the low-degree case
  bool high_degree = false;        // which of the two vertex-growth cases won
};

struct RatioSolution {
  TreeSolution tree;
  std::vector<DemandId> covered;  // sorted; each has both endpoints in the tree
  double ratio = 0.0;             // tree.length / covered.size()
  RatioAlgo algo = RatioAlgo::kBest;
  GuessState guess;
};

// All three treat instance.k as the cap on covered demands (clamped to the
// demand count) and throw Infeasible when there are no demands.
RatioSolution ratio_sqrt_k(const KForestInstance& instance, const RatioOptions& options = {});
RatioSolution ratio_sqrt_n(const KForestInstance& instance, const RatioOptions& options = {});
RatioSolution ratio_best(const KForestInstance& instance, const RatioOptions& options = {});
RatioSolution ratio_solve(const KForestInstance& instance, RatioAlgo algo,
                          const RatioOptions& options = {});

// Worst-case factor each algorithm guarantees against the optimal ratio,
// given a k-MST solver with factor alpha. `cap` is the covered-demand cap and
// `n` the vertex count.
double ratio_sqrt_k_factor(int cap, double alpha = 1.0);
double ratio_sqrt_n_factor(std::size_t n, double alpha = 1.0);
double ratio_best_factor(int cap, std::size_t n, double alpha = 1.0);
double ratio_factor(RatioAlgo algo, int cap, std::size_t n, double alpha = 1.0);

// One (pairs, max_pair_distance) guess of the sqrt(k) algorithm. Empty when
// fewer than floor(sqrt(pairs)) demands pass the distance filter.
struct SqrtKCandidate {
  RatioSolution solution;
  double demand_tree_length = 0.0;  // k-MST tree length in the demand metric
};
std::optional<SqrtKCandidate> sqrt_k_guess(const KForestInstance& instance, int pairs,
                                           double max_pair_distance,
                                           const RatioOptions& options = {});

// The metric on demands: l(i, j) = d(s_i, s_j) + d(t_i, t_j).
Metric demand_metric(const Metric& metric, std::span<const Demand> demands);

// Demands (by index) with both endpoints among `vertices` (sorted).
std::vector<DemandId> demands_inside(std::span<const Demand> demands,
                                     std::span<const Vertex> vertices);

// Recomputes every RatioSolution invariant against the instance.
bool verify_ratio_solution(const KForestInstance& instance, const RatioSolution& solution);

struct MonotoneSubsequence {
  std::vector<std::size_t> indices;  // positions into the permutation
  bool increasing = true;
};

// Longest increasing or decreasing subsequence, whichever is longer
// (increasing on ties). Its length is at least floor(sqrt(q)). Throws
// InvalidArgument unless `perm` is a permutation of 1..q.
MonotoneSubsequence monotone_subsequence(std::span<const int> perm);

}  // namespace kfdar
