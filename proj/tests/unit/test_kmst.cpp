#include <doctest.h>

#include <cmath>
#include <limits>

#include "fuzz.hpp"
#include "kfdar/errors.hpp"
#include "kfdar/kmst.hpp"

using namespace kfdar;

namespace {

// Subset enumeration: every vertex set meeting the target, scored by its MST.
double enumerate_kmst(const Metric& metric, std::optional<Vertex> root,
                      const std::vector<std::int64_t>& weights, std::int64_t target) {
  const std::size_t n = metric.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (root && !(mask & (1u << *root))) continue;
    std::int64_t w = 0;
    std::vector<Vertex> vs;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask & (1u << v)) {
        vs.push_back(static_cast<Vertex>(v));
        w += weights.empty() ? 1 : weights[v];
      }
    }
    if (w >= target) best = std::min(best, mst_length(metric, vs));
  }
  return best;
}

std::int64_t covered(const TreeSolution& t, const std::vector<std::int64_t>& weights) {
  std::int64_t w = 0;
  for (Vertex v : t.vertices) w += weights.empty() ? 1 : weights[static_cast<std::size_t>(v)];
  return w;
}

}  // namespace

TEST_CASE("kmst examples") {
  const Metric line = fuzz::unit_line(5);
  KmstQuery q{line, 2, 1, {}, KmstMode::kExact};
  auto t = kmst_solve(q);
  CHECK(t.vertices == std::vector<Vertex>{2});
  CHECK(t.length == 0.0);

  KmstQuery three{line, std::nullopt, 3, {}, KmstMode::kExact};
  t = kmst_solve(three);
  CHECK(t.length == doctest::Approx(2.0));
  CHECK(t.vertices.size() == 3);
  CHECK(t.vertices == std::vector<Vertex>{0, 1, 2});  // lexicographically smallest optimum
  CHECK(kmst_exact_certify(three, t));

  // A redundant extra edge makes the solution non-minimal.
  TreeSolution longer = kmst_solve(KmstQuery{line, std::nullopt, 4, {}, KmstMode::kExact});
  CHECK(!kmst_exact_certify(three, longer));

  KmstQuery too_much{line, std::nullopt, 6, {}, KmstMode::kExact};
  CHECK_THROWS_AS(kmst_solve(too_much), Infeasible);
  KmstQuery bad_root{line, 7, 1, {}, KmstMode::kExact};
  CHECK_THROWS_AS(kmst_solve(bad_root), InvalidArgument);

  fuzz::Rng rng(1);
  const Metric big = fuzz::random_metric(rng, 17);
  KmstQuery huge{big, std::nullopt, 3, {}, KmstMode::kExact};
  const auto sol = kmst_solve(KmstQuery{big, std::nullopt, 3, {}, KmstMode::kHeuristic});
  CHECK_THROWS_AS(kmst_exact_certify(huge, sol), TooLarge);
}

TEST_CASE("exact mode matches subset enumeration") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    fuzz::Rng rng(seed);
    const int n = fuzz::uniform(rng, 2, 10);
    const Metric m = fuzz::random_metric(rng, n);
    std::vector<std::int64_t> weights;
    if (fuzz::coin(rng, 0.5)) {
      for (int v = 0; v < n; ++v) weights.push_back(fuzz::uniform(rng, 0, 3));
    }
    std::int64_t total = 0;
    for (int v = 0; v < n; ++v) total += weights.empty() ? 1 : weights[static_cast<std::size_t>(v)];
    if (total == 0) continue;
    std::optional<Vertex> root;
    if (fuzz::coin(rng, 0.5)) root = fuzz::uniform(rng, 0, n - 1);
    const std::int64_t target = fuzz::uniform(rng, 1, static_cast<int>(total));
    const KmstQuery q{m, root, target, weights, KmstMode::kExact};
    const double expect = enumerate_kmst(m, root, weights, target);
    const auto t = kmst_solve(q);
    REQUIRE(is_valid_tree(m, t));
    CHECK(covered(t, weights) >= target);
    if (root) CHECK(std::binary_search(t.vertices.begin(), t.vertices.end(), *root));
    CHECK(t.length == doctest::Approx(expect));
    CHECK(kmst_exact_certify(q, t));

    KmstQuery hq = q;
    hq.mode = KmstMode::kHeuristic;
    const auto h = kmst_solve(hq);
    REQUIRE(is_valid_tree(m, h));
    CHECK(covered(h, weights) >= target);
    CHECK(h.length >= t.length - 1e-9);
  }
}

TEST_CASE("exact optimum is monotone in the target") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    fuzz::Rng rng(seed);
    const int n = fuzz::uniform(rng, 2, 9);
    const Metric m = fuzz::random_metric(rng, n);
    KmstSolver solver(m);
    double prev = 0.0;
    for (int target = 1; target <= n; ++target) {
      const double len = solver.solve(std::nullopt, {}, target, KmstMode::kExact).length;
      CHECK(len >= prev - 1e-9);
      prev = len;
    }
  }
}

TEST_CASE("heuristic stays feasible at scale") {
  fuzz::Rng rng(3);
  std::vector<Point> pts(300);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& p : pts) p = {u(rng), u(rng)};
  const Metric m = metric_from_points(pts);
  KmstSolver solver(m);
  for (int target : {1, 5, 40, 300}) {
    const auto t = solver.solve(std::nullopt, {}, target, KmstMode::kAuto);
    CHECK(is_valid_tree(m, t));
    CHECK(static_cast<int>(t.vertices.size()) >= target);
  }
  const auto rooted = solver.solve(17, {}, 10, KmstMode::kHeuristic);
  CHECK(std::binary_search(rooted.vertices.begin(), rooted.vertices.end(), 17));
}
