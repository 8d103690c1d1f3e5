#include <doctest.h>

#include <cmath>

#include "fuzz.hpp"
#include "kfdar/errors.hpp"
#include "kfdar/generators.hpp"
#include "kfdar/instance.hpp"
#include "kfdar/io.hpp"
#include "kfdar/oracles.hpp"

using namespace kfdar;

namespace {

bool has(const FeasibilityReport& r, ViolationKind kind) {
  for (const auto& v : r.violations) {
    if (v.kind == kind) return true;
  }
  return false;
}

// Random local damage: drop an action, move an action, retarget a stop.
Tour mutate(const DialARideInstance& inst, Tour tour, fuzz::Rng& rng) {
  if (tour.stops.empty()) return tour;
  auto& stop = tour.stops[static_cast<std::size_t>(
      fuzz::uniform(rng, 0, static_cast<int>(tour.stops.size()) - 1))];
  switch (fuzz::uniform(rng, 0, 3)) {
    case 0:
      if (!stop.pick.empty()) stop.pick.pop_back();
      break;
    case 1:
      if (!stop.drop.empty()) stop.drop.pop_back();
      break;
    case 2:
      stop.v = fuzz::uniform(rng, 0, static_cast<int>(inst.metric.size()) - 1);
      break;
    default: {
      auto& other = tour.stops[static_cast<std::size_t>(
          fuzz::uniform(rng, 0, static_cast<int>(tour.stops.size()) - 1))];
      if (!stop.pick.empty()) {
        other.pick.push_back(stop.pick.back());
        stop.pick.pop_back();
      }
    }
  }
  return tour;
}

}  // namespace

TEST_CASE("check_tour_feasible examples") {
  DialARideInstance empty;
  empty.metric = fuzz::unit_line(2);
  Tour root_only{{{0, {}, {}}}};
  CHECK(check_tour_feasible(empty, root_only).ok());

  DialARideInstance two;
  two.metric = fuzz::unit_line(3);
  two.capacity = 1;
  two.demands = {{0, 2, 1}, {0, 1, 1}};
  Tour overfull{{{0, {0, 1}, {}}, {1, {}, {1}}, {2, {}, {0}}, {0, {}, {}}}};
  const auto r = check_tour_feasible(two, overfull);
  REQUIRE(has(r, ViolationKind::kCapacityOverflow));
  for (const auto& v : r.violations) {
    if (v.kind == ViolationKind::kCapacityOverflow) CHECK(v.stop == 0);
  }

  const auto inst = fuzz::line3();
  const Tour good = load_tour(fuzz::fixture("line3_tour.json"));
  const auto ok = check_tour_feasible(inst, good);
  CHECK(ok.ok());
  CHECK(ok.max_load == 1);
  CHECK(tour_length(inst.metric, good) == doctest::Approx(4.0));
}

TEST_CASE("violation kinds") {
  const auto inst = fuzz::line3();
  CHECK(has(check_tour_feasible(inst, Tour{{{1, {}, {}}}}), ViolationKind::kBadStartOrEnd));
  CHECK(has(check_tour_feasible(inst, Tour{{{0, {7}, {}}, {0, {}, {}}}}),
            ViolationKind::kUnknownDemand));
  CHECK(has(check_tour_feasible(inst, Tour{{{0, {}, {0}}, {0, {}, {}}}}),
            ViolationKind::kDropBeforePickup));
  CHECK(has(check_tour_feasible(inst, Tour{{{0, {0}, {}}, {1, {}, {0}}, {0, {}, {}}}}),
            ViolationKind::kWrongEndpoint));
  CHECK(has(check_tour_feasible(inst, Tour{{{0, {}, {}}}}), ViolationKind::kUnserved));
  CHECK(has(check_tour_feasible(inst, Tour{{{2, {1}, {}}, {0, {}, {}}}}),
            ViolationKind::kBadStartOrEnd));

  // Preemption: drop a at 1, pick it up again, deliver.
  const Tour pre{{{0, {0}, {}}, {1, {}, {0}}, {1, {0}, {}}, {2, {1}, {0}}, {0, {}, {1}}}};
  CHECK(!check_tour_feasible(inst, pre).ok());
  CHECK(check_tour_feasible(inst, pre, true, 1).ok());
  const Tour twice{{{0, {0}, {}},
                    {1, {}, {0}},
                    {1, {0}, {}},
                    {1, {}, {0}},
                    {1, {0}, {}},
                    {2, {1}, {0}},
                    {0, {}, {1}}}};
  CHECK(has(check_tour_feasible(inst, twice, true, 1), ViolationKind::kPreemptionOverflow));
  CHECK(check_tour_feasible(inst, twice, true, 2).ok());
}

TEST_CASE("degenerate demands are served by a visit") {
  DialARideInstance inst;
  inst.metric = fuzz::unit_line(3);
  inst.demands = {{2, 2, 1}};
  CHECK(check_tour_feasible(inst, Tour{{{0, {}, {}}, {2, {}, {}}, {0, {}, {}}}}).ok());
  CHECK(!check_tour_feasible(inst, Tour{{{0, {}, {}}, {1, {}, {}}, {0, {}, {}}}}).ok());
}

TEST_CASE("checker agrees with the independent replay") {
  int infeasible = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto inst = fuzz::tiny_dar(seed, 6, 0, 5, 3, 3);
    fuzz::Rng rng(seed ^ 0x5eed);
    Tour tour = fuzz::random_feasible_tour(inst, rng);
    REQUIRE(check_tour_feasible(inst, tour).ok());
    REQUIRE(oracle::replay_feasible(inst, tour));
    for (int k = 0; k < 3; ++k) {
      tour = mutate(inst, tour, rng);
      const bool a = check_tour_feasible(inst, tour).ok();
      const bool b = oracle::replay_feasible(inst, tour);
      CHECK(a == b);
      if (!a) ++infeasible;
    }
  }
  CHECK(infeasible > 100);
}

TEST_CASE("tour_length") {
  const Metric line = fuzz::unit_line(3);
  CHECK(tour_length(line, Tour{{{1, {}, {}}}}) == 0.0);
  CHECK(tour_length(line, Tour{{{0, {}, {}}, {2, {}, {}}, {0, {}, {}}}}) == doctest::Approx(4.0));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = fuzz::tiny_dar(seed);
    fuzz::Rng rng(seed);
    const Tour t = fuzz::random_feasible_tour(inst, rng);
    double naive = 0.0;
    for (std::size_t i = 1; i < t.stops.size(); ++i) {
      naive += inst.metric(t.stops[i - 1].v, t.stops[i].v);
    }
    CHECK(tour_length(inst.metric, t) == doctest::Approx(naive));
  }
}

TEST_CASE("lower_bounds") {
  const auto inst = fuzz::line3();
  CHECK(lower_bounds(inst).flow == doctest::Approx(4.0));
  CHECK(lower_bounds(inst).steiner == doctest::Approx(2.0));

  DialARideInstance none;
  none.metric = fuzz::unit_line(3);
  CHECK(lower_bounds(none).flow == 0.0);
  CHECK(lower_bounds(none).steiner == 0.0);

  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto d = fuzz::tiny_dar(seed, 6, 0, 5, 3, 3);
    const auto lb = lower_bounds(d);
    const double opt = oracle::exact_dar_oracle(d).length;
    CHECK(lb.flow <= opt + 1e-9);
    CHECK(lb.steiner <= opt + 1e-9);
  }
}

TEST_CASE("gen_euclidean_random") {
  const auto one = gen_euclidean_random(1, 3);
  CHECK(one.capacity == 1);
  CHECK(one.demands.size() == 1);

  const auto a = gen_euclidean_random(100, 11);
  const auto b = gen_euclidean_random(100, 11);
  CHECK(a.capacity == 10);
  REQUIRE(a.points);
  REQUIRE(b.points);
  for (std::size_t i = 0; i < a.points->size(); ++i) {
    CHECK((*a.points)[i].x == (*b.points)[i].x);
    CHECK((*a.points)[i].y == (*b.points)[i].y);
  }
  CHECK(a.demands == b.demands);
  for (const auto& p : *a.points) {
    CHECK(p.x >= 0.0);
    CHECK(p.x <= 1.0);
    CHECK(p.y >= 0.0);
    CHECK(p.y <= 1.0);
  }
  for (std::size_t i = 0; i < a.demands.size(); ++i) {
    CHECK(a.demands[i].s == static_cast<Vertex>(2 * i));
    CHECK(a.demands[i].t == static_cast<Vertex>(2 * i + 1));
  }
  // Root is the endpoint nearest the origin.
  const auto& pts = *a.points;
  const auto norm = [](Point p) { return std::hypot(p.x, p.y); };
  for (const auto& p : pts) CHECK(norm(pts[static_cast<std::size_t>(a.root)]) <= norm(p));
}

TEST_CASE("gen_random_metric_instance") {
  const auto tiny = gen_random_metric_instance(2, 1, 1, 5);
  REQUIRE(tiny.demands.size() == 1);
  CHECK(tiny.demands[0].s != tiny.demands[0].t);

  const auto a = gen_random_metric_instance(7, 5, 3, 42);
  const auto b = gen_random_metric_instance(7, 5, 3, 42);
  CHECK(a.demands == b.demands);
  for (std::size_t i = 0; i < a.metric.data().size(); ++i) {
    CHECK(a.metric.data()[i] == b.metric.data()[i]);
  }
  CHECK(max_triangle_violation(a.metric) <= kDistanceTolerance);
  for (Vertex u = 0; u < 7; ++u) {
    for (Vertex v = 0; v < 7; ++v) {
      if (u != v) CHECK(a.metric(u, v) >= 1.0 - 1e-9);
      CHECK(a.metric(u, v) <= 10.0 + 1e-9);
    }
  }
}

TEST_CASE("instance validation") {
  KForestInstance k;
  k.metric = fuzz::unit_line(3);
  k.demands = {{0, 1, 1}};
  k.k = 2;
  CHECK_THROWS_AS(k.validate(), InvalidInstance);

  DialARideInstance d;
  d.metric = fuzz::unit_line(3);
  d.capacity = 2;
  d.demands = {{0, 1, 3}};
  CHECK_THROWS_AS(d.validate(), InvalidInstance);
  d.demands = {{0, 5, 1}};
  CHECK_THROWS_AS(d.validate(), InvalidInstance);
  d.demands = {{0, 1, 1}};
  d.root = 9;
  CHECK_THROWS_AS(d.validate(), InvalidInstance);
}

TEST_CASE("json round trips") {
  const auto file = load_instance(fuzz::fixture("path5.json"));
  CHECK(file.k == 2);
  CHECK(file.demands.size() == 4);
  const auto again = instance_from_json(nlohmann::json::parse(instance_to_json(file).dump()));
  CHECK(again.demands == file.demands);
  CHECK(again.root == file.root);
  CHECK(again.capacity == file.capacity);
  CHECK(again.k == file.k);
  for (std::size_t i = 0; i < file.metric.data().size(); ++i) {
    CHECK(again.metric.data()[i] == doctest::Approx(file.metric.data()[i]));
  }

  const Tour t = load_tour(fuzz::fixture("line3_tour.json"));
  CHECK(tour_from_json(nlohmann::json::parse(tour_to_json(t).dump())) == t);

  const auto costs = load_instance(fuzz::fixture("one_edge_costs.json"));
  REQUIRE(costs.costs);
  CHECK(costs.costs->table[0] == std::vector<double>{1, 5});

  CHECK_THROWS_AS(instance_from_json(nlohmann::json::parse("[]")), InvalidInstance);
  CHECK_THROWS_AS(instance_from_json(nlohmann::json::parse(R"({"n":2})")), InvalidInstance);
  CHECK_THROWS_AS(
      instance_from_json(nlohmann::json::parse(
          R"({"n":2,"dist":[[0,1],[1,0]],"root":0,"capacity":1,"demands":[{"s":0,"t":"x"}]})")),
      InvalidInstance);
  CHECK_THROWS_AS(tour_from_json(nlohmann::json::parse(R"({"stops":[{"pick":[]}]})")),
                  InvalidInstance);
}
