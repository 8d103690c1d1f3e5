#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fuzz.hpp"
#include "kfdar/errors.hpp"
#include "kfdar/oracles.hpp"
#include "kfdar/preemption.hpp"

using namespace kfdar;

namespace {

void check_hst_shape(const Metric& m, const Hst& h) {
  const std::size_t n = m.size();
  REQUIRE(h.leaf.size() == n);
  CHECK(h.nodes[static_cast<std::size_t>(h.root)].members.size() == n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& leaf = h.nodes[static_cast<std::size_t>(h.leaf[v])];
    CHECK(leaf.children.empty());
    CHECK(leaf.members == std::vector<Vertex>{static_cast<Vertex>(v)});
  }
  for (std::size_t i = 0; i < h.nodes.size(); ++i) {
    const auto& node = h.nodes[i];
    if (node.children.empty()) continue;
    std::vector<Vertex> merged;
    for (int c : node.children) {
      const auto& child = h.nodes[static_cast<std::size_t>(c)];
      CHECK(child.parent == static_cast<int>(i));
      CHECK(child.level < node.level);
      merged.insert(merged.end(), child.members.begin(), child.members.end());
    }
    std::sort(merged.begin(), merged.end());
    CHECK(merged == node.members);
  }
}

DialARideInstance star_from_hub(int legs, Direction dir) {
  DialARideInstance inst;
  inst.metric = fuzz::unit_line(legs + 1);
  for (int j = 1; j <= legs; ++j) {
    inst.demands.push_back(dir == Direction::kScatter ? Demand{0, j, 1} : Demand{j, 0, 1});
  }
  return inst;
}

std::vector<DemandId> ids_of(std::size_t m) {
  std::vector<DemandId> ids(m);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

TEST_CASE("frt_embed small cases") {
  const Metric one = Metric::from_matrix({{0.0}});
  const Hst h = frt_embed(one, 1);
  CHECK(h.distance(0, 0) == 0.0);
  check_hst_shape(one, h);

  const Metric twins = Metric::from_matrix({{0, 0, 1}, {0, 0, 1}, {1, 1, 0}});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Hst t = frt_embed(twins, seed);
    check_hst_shape(twins, t);
    CHECK(t.distance(0, 2) >= 1.0);
    CHECK(t.distance(0, 1) == 0.0);
  }
  CHECK_THROWS_AS(frt_embed(Metric{}, 0), InvalidArgument);
}

TEST_CASE("frt_embed dominates and has bounded mean stretch") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    fuzz::Rng rng(seed);
    const int n = fuzz::uniform(rng, 2, 20);
    const Metric m = fuzz::random_metric(rng, n);
    const Hst h = frt_embed(m, seed * 7 + 1);
    check_hst_shape(m, h);
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = 0; v < n; ++v) {
        CHECK(h.distance(u, v) >= m(u, v) - 1e-9);
        CHECK(h.distance(u, v) == doctest::Approx(h.distance(v, u)));
      }
    }
  }

  const int n = 16;
  const Metric m = gen_random_metric(n, 42);
  std::vector<double> sum(static_cast<std::size_t>(n * n), 0.0);
  const int trials = 100;
  for (int s = 0; s < trials; ++s) {
    const Hst h = frt_embed(m, static_cast<std::uint64_t>(s));
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) {
        if (m(u, v) > 0) sum[static_cast<std::size_t>(u * n + v)] += h.distance(u, v) / m(u, v);
      }
    }
  }
  double worst = 0.0;
  for (double x : sum) worst = std::max(worst, x / trials);
  MESSAGE("largest mean stretch over a pair: " << worst);
  CHECK(worst <= 16 * std::log(static_cast<double>(n)));
}

TEST_CASE("single_source_dar examples") {
  const auto scatter = star_from_hub(3, Direction::kScatter);
  const auto ids = ids_of(3);
  Tour t = single_source_dar(scatter.metric, 0, scatter.demands, ids, 3, Direction::kScatter);
  DialARideInstance roomy = scatter;
  roomy.capacity = 3;
  CHECK(check_tour_feasible(roomy, t).ok());
  CHECK(tour_length(scatter.metric, t) == doctest::Approx(6.0));

  t = single_source_dar(scatter.metric, 0, scatter.demands, ids, 1, Direction::kScatter);
  CHECK(check_tour_feasible(scatter, t).ok());
  CHECK(tour_length(scatter.metric, t) == doctest::Approx(2.0 + 4.0 + 6.0));

  const auto gather = star_from_hub(3, Direction::kGather);
  t = single_source_dar(gather.metric, 0, gather.demands, ids, 2, Direction::kGather);
  DialARideInstance two = gather;
  two.capacity = 2;
  CHECK(check_tour_feasible(two, t).ok());
  CHECK(tour_length(gather.metric, t) == doctest::Approx(2.0 + 6.0));

  CHECK_THROWS_AS(single_source_dar(scatter.metric, 1, scatter.demands, ids, 1, Direction::kScatter),
                  InvalidArgument);
  CHECK_THROWS_AS(single_source_dar(scatter.metric, 0, scatter.demands, ids, 1, Direction::kGather),
                  InvalidArgument);
}

TEST_CASE("fuzzed single_source_dar") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    fuzz::Rng rng(seed);
    const int n = fuzz::uniform(rng, 2, 10);
    DialARideInstance inst;
    inst.metric = fuzz::random_metric(rng, n);
    inst.root = fuzz::uniform(rng, 0, n - 1);
    inst.capacity = fuzz::uniform(rng, 1, 4);
    const Direction dir = fuzz::coin(rng, 0.5) ? Direction::kGather : Direction::kScatter;
    const int m = fuzz::uniform(rng, 1, 8);
    for (int i = 0; i < m; ++i) {
      const Vertex far = fuzz::uniform(rng, 0, n - 1);
      inst.demands.push_back(dir == Direction::kGather ? Demand{far, inst.root, 1}
                                                       : Demand{inst.root, far, 1});
    }
    const auto ids = ids_of(inst.demands.size());
    const Tour t = single_source_dar(inst.metric, inst.root, inst.demands, ids, inst.capacity, dir);
    REQUIRE(check_tour_feasible(inst, t).ok());
    const auto lb = lower_bounds(inst);
    CHECK(tour_length(inst.metric, t) <= 4 * (lb.steiner + lb.flow) + 1e-9);
  }
}

TEST_CASE("one-preemptive solver") {
  const auto line = fuzz::line3();
  const auto r = one_preemptive_solve_detailed(line, 0);
  CHECK(check_tour_feasible(line, r.tour, true, 1).ok());
  CHECK(r.length >= 4.0 - 1e-9);

  DialARideInstance heavy = line;
  heavy.capacity = 2;
  heavy.demands[0].w = 2;
  CHECK_THROWS_AS(one_preemptive_solve(heavy, 0), InvalidInstance);

  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto inst = fuzz::tiny_dar(seed, 10, 0, 6, 4);
    const auto res = one_preemptive_solve_detailed(inst, seed);
    const auto report = check_tour_feasible(inst, res.tour, true, 1);
    REQUIRE(report.ok());
    for (int c : report.preemptions) CHECK(c <= 1);
    CHECK(oracle::replay_feasible(inst, res.tour, 1));
    CHECK(res.length >= lower_bounds(inst).best() - 1e-9);
    CHECK(res.length == doctest::Approx(tour_length(inst.metric, res.tour)));
    for (std::size_t i = 0; i < inst.demands.size(); ++i) {
      const auto& d = inst.demands[i];
      CHECK(res.bucket[i] == res.hst.lca(d.s, d.t));
      const auto& members = res.hst.nodes[static_cast<std::size_t>(res.bucket[i])].members;
      CHECK(std::binary_search(members.begin(), members.end(), res.hub[i]));
    }
    const auto best = one_preemptive_best_of(inst, seed, 3);
    CHECK(best.length <= res.length + 1e-9);
    CHECK(check_tour_feasible(inst, best.tour, true, 1).ok());
  }
}
