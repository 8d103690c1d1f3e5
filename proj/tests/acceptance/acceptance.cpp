// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Budgets and corpora are fixed; nothing here is tuned per run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fuzz.hpp"
#include "kfdar/cli.hpp"
#include "kfdar/dial_a_ride.hpp"
#include "kfdar/kforest.hpp"
#include "kfdar/nonuniform.hpp"
#include "kfdar/oracles.hpp"
#include "kfdar/preemption.hpp"
#include "kfdar/ratio.hpp"
#include "kfdar/weighted.hpp"

using namespace kfdar;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  double budget_s = 0.0;  // 0: no runtime limit
};

// Collects the first few failure messages of a criterion.
struct Failures {
  int count = 0;
  std::string first;
  void add(const std::string& what) {
    if (count++ == 0) first = what;
  }
  std::string note() const {
    return count == 0 ? std::string() : "; " + std::to_string(count) + " violations, first: " + first;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

int log2_groups(std::size_t m) {
  return static_cast<int>(std::ceil(std::log2(2.0 * static_cast<double>(m)) - 1e-12));
}

double rho_dar(const DialARideInstance& inst, const DarResult& res) {
  double rho = 1.0;
  for (const auto& round : res.rounds) {
    KForestInstance sub;
    sub.metric = inst.metric;
    for (DemandId id : round.residual) sub.demands.push_back(inst.demands[static_cast<std::size_t>(id)]);
    sub.k = round.cap;
    const double opt = oracle::exact_ratio_oracle(sub).ratio;
    if (opt > 1e-12) rho = std::max(rho, round.ratio / opt);
  }
  return rho;
}

std::vector<DemandId> all_ids(std::size_t m) {
  std::vector<DemandId> ids(m);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

Outcome erdos_szekeres() {
  Failures f;
  long perms = 0;
  for (int q = 1; q <= 8; ++q) {
    std::vector<int> perm(static_cast<std::size_t>(q));
    std::iota(perm.begin(), perm.end(), 1);
    const auto need = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(q))));
    do {
      ++perms;
      const auto s = monotone_subsequence(perm);
      bool ok = s.indices.size() >= need;
      for (std::size_t i = 1; ok && i < s.indices.size(); ++i) {
        const int a = perm[s.indices[i - 1]];
        const int b = perm[s.indices[i]];
        ok = s.indices[i] > s.indices[i - 1] && (s.increasing ? a < b : a > b);
      }
      if (!ok) f.add("q=" + std::to_string(q));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return {f.count == 0, std::to_string(perms) + " permutations" + f.note(), 10};
}

Outcome ratio_bounds() {
  Failures f;
  RatioOptions opts;
  opts.kmst_mode = KmstMode::kExact;
  double worst_k = 0.0, worst_n = 0.0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto inst = fuzz::tiny_kforest(seed);
    const double opt = oracle::exact_ratio_oracle(inst).ratio;
    const double n = static_cast<double>(inst.metric.size());
    const double rk = ratio_sqrt_k(inst, opts).ratio;
    const double rn = ratio_sqrt_n(inst, opts).ratio;
    if (rk > 18 * std::sqrt(static_cast<double>(inst.k)) * opt + 1e-9) f.add("sqrt-k seed " + std::to_string(seed));
    if (rn > 16 * std::sqrt(n) * opt + 1e-9) f.add("sqrt-n seed " + std::to_string(seed));
    if (opt > 1e-12) {
      worst_k = std::max(worst_k, rk / opt);
      worst_n = std::max(worst_n, rn / opt);
    }
  }
  return {f.count == 0,
          "300 instances, worst sqrt-k/opt " + fmt(worst_k) + ", sqrt-n/opt " + fmt(worst_n) + f.note(),
          300};
}

Outcome kforest_bounds() {
  Failures f;
  RatioOptions opts;
  opts.kmst_mode = KmstMode::kExact;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto inst = fuzz::tiny_kforest(seed);
    const auto sol = kforest_solve(inst, RatioAlgo::kBest, opts);
    if (static_cast<int>(connected_pairs(inst, sol.trees).size()) < inst.k) {
      f.add("too few pairs, seed " + std::to_string(seed));
    }
    const double opt = oracle::exact_kforest_oracle(inst).length;
    const double k = inst.k;
    const double n = static_cast<double>(inst.metric.size());
    const double budget = std::min(18 * std::sqrt(k), 16 * std::sqrt(n)) * (1 + std::log(k));
    if (sol.length > budget * opt + 1e-9) f.add("length, seed " + std::to_string(seed));
    if (opt > 1e-12) worst = std::max(worst, sol.length / opt);
  }
  return {f.count == 0, "300 instances, worst length/opt " + fmt(worst) + f.note(), 300};
}

Outcome path5_regression() {
  const double r2 = oracle::exact_ratio_oracle(fuzz::path5(2)).ratio;
  const double f2 = oracle::exact_kforest_oracle(fuzz::path5(2)).length;
  const double f3 = oracle::exact_kforest_oracle(fuzz::path5(3)).length;
  const bool ok = std::abs(r2 - 1.5) < 1e-9 && std::abs(f2 - 3) < 1e-9 && std::abs(f3 - 4) < 1e-9;
  return {ok, "ratio(k=2) " + fmt(r2) + ", forest(k=2) " + fmt(f2) + ", forest(k=3) " + fmt(f3)};
}

Outcome structure_constant() {
  Failures f;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = fuzz::tiny_dar(seed, 6, 1, 6, 3);
    fuzz::Rng rng(seed * 31 + 7);
    const Tour t = fuzz::random_feasible_tour(inst, rng);
    const double len = tour_length(inst.metric, t);
    const auto d = decompose_tour(inst, t);
    const double budget = 6.0 * log2_groups(inst.demands.size());
    if (d.length > budget * len + 1e-9) f.add("length, seed " + std::to_string(seed));
    if (len > 0) worst = std::max(worst, d.length / len);
    for (const auto& seg : d.segments) {
      bool dropping = false;
      std::size_t picks = 0, drops = 0;
      for (const auto& stop : seg.path) {
        if (!stop.drop.empty()) dropping = true;
        if (!stop.pick.empty() && dropping) f.add("pick after drop, seed " + std::to_string(seed));
        picks += stop.pick.size();
        drops += stop.drop.size();
      }
      if (picks != seg.batch.size() || drops != seg.batch.size()) f.add("batch, seed " + std::to_string(seed));
      if (static_cast<std::int64_t>(seg.batch.size()) > inst.capacity) f.add("capacity, seed " + std::to_string(seed));
    }
    if (!oracle::replay_feasible(inst, d.tour)) f.add("infeasible, seed " + std::to_string(seed));
  }
  return {f.count == 0, "200 tours, worst output/input " + fmt(worst) + f.note(), 60};
}

Outcome dar_end_to_end() {
  Failures f;
  double worst = 0.0, worst_rho = 1.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = fuzz::tiny_dar(seed);
    const auto res = dar_solve_detailed(inst);
    const std::string tag = "seed " + std::to_string(seed);
    if (!check_tour_feasible(inst, res.tour).ok() || !oracle::replay_feasible(inst, res.tour)) {
      f.add("infeasible, " + tag);
      continue;
    }
    const auto lb = lower_bounds(inst);
    if (res.length < std::max(lb.flow, lb.steiner) - 1e-9) f.add("below lower bound, " + tag);
    const double opt = oracle::exact_dar_oracle(inst).length;
    const double rho = rho_dar(inst, res);
    const double m = static_cast<double>(inst.demands.size());
    const double budget = 2 + rho * (1 + std::log(m)) * 6 * log2_groups(inst.demands.size());
    if (res.length > budget * opt + 1e-9) f.add("over budget, " + tag);
    worst_rho = std::max(worst_rho, rho);
    if (opt > 1e-12) worst = std::max(worst, res.length / opt);
  }
  return {f.count == 0,
          "200 instances, worst length/opt " + fmt(worst) + ", largest rho_obs " + fmt(worst_rho) + f.note(),
          600};
}

Outcome sqrt_k_load() {
  Failures f;
  DarOptions opts;
  opts.algo = RatioAlgo::kSqrtK;
  int runs = 0;
  auto check = [&](const DialARideInstance& inst, const std::string& tag) {
    ++runs;
    const Tour t = dar_solve(inst, opts);
    const auto report = check_tour_feasible(inst, t);
    const auto limit = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(inst.capacity))));
    if (!report.ok()) f.add("infeasible, " + tag);
    if (report.max_load > limit) f.add("load " + std::to_string(report.max_load) + ", " + tag);
  };
  for (std::uint64_t seed = 0; seed < 200; ++seed) check(fuzz::tiny_dar(seed), "small seed " + std::to_string(seed));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    check(fuzz::tiny_dar(seed, 8, 1, 12, 10), "wide seed " + std::to_string(seed));
  }
  return {f.count == 0, std::to_string(runs) + " instances" + f.note()};
}

Outcome nonuniform_checks() {
  Failures f;
  double worst_diff = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = fuzz::tiny_dar(seed, 7, 0, 6, 3);
    const auto cf = CostFunction::classical(inst.metric, inst.capacity, inst.demands.size());
    fuzz::Rng rng(seed);
    const Tour t = fuzz::random_feasible_tour(inst, rng);
    const double diff = std::abs(nonuniform_cost(cf, inst, t) - tour_length(inst.metric, t));
    worst_diff = std::max(worst_diff, diff);
    if (diff > 1e-9) f.add("classical identity, seed " + std::to_string(seed));
    const auto solved = dar_solve(inst);
    if (std::abs(nonuniform_cost(cf, inst, solved) - tour_length(inst.metric, solved)) > 1e-9) {
      f.add("classical identity on solver output, seed " + std::to_string(seed));
    }
  }
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    fuzz::Rng rng(seed + 7000);
    const int n = fuzz::uniform(rng, 2, 5);
    const int m = fuzz::uniform(rng, 1, 4);
    const Metric metric = fuzz::random_metric(rng, n);
    const auto demands = fuzz::random_demands(rng, n, m, 1);
    const auto cf = CostFunction::from_table(static_cast<std::size_t>(n),
                                             fuzz::random_costs(metric, static_cast<std::size_t>(m), rng));
    const auto ids = all_ids(demands.size());
    const auto b = nonuniform_greedy_subproblem(cf, demands, ids);
    double rho = 1.0;
    for (std::size_t k = 1; k <= b.tree_ratio.size(); ++k) {
      KForestInstance sub{cf.slice(k), demands, static_cast<int>(k)};
      const double opt = oracle::exact_ratio_oracle(sub).ratio;
      if (opt > 1e-12) rho = std::max(rho, b.tree_ratio[k - 1] / opt);
    }
    const double best = oracle::best_batch_ratio(cf, demands, ids);
    if (b.ratio > 16 * rho * best + 1e-9) f.add("greedy, seed " + std::to_string(seed));
    if (best > 1e-12) worst = std::max(worst, b.ratio / (rho * best));
  }
  return {f.count == 0,
          "identity max |diff| " + fmt(worst_diff) + ", worst greedy/(rho*best) " + fmt(worst) + f.note()};
}

Outcome weighted_checks() {
  Failures f;
  int rounded = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    // Two regimes: small capacities, and large ones where rounding kicks in.
    const bool wide = seed % 2 == 1;
    const auto inst = wide ? fuzz::tiny_dar(seed, 8, 1, 8, 100, 100) : fuzz::tiny_dar(seed, 6, 1, 6, 8, 8);
    const std::string tag = "seed " + std::to_string(seed);
    const auto r = weighted_dar_solve_detailed(inst);
    const auto& p = r.partition;
    const std::int64_t q = inst.capacity;
    const std::int64_t l = static_cast<std::int64_t>(p.pairs.size());
    if (p.l != l) f.add("l, " + tag);
    if (p.rounded) ++rounded;
    for (std::size_t i = 0; i < p.pairs.size(); ++i) {
      const std::int64_t t = p.pairs[i].total;
      const PairClass want = 2 * t >= q ? PairClass::kHigh : t * l <= q ? PairClass::kLow : PairClass::kPrime;
      if (p.cls[i] != want) f.add("threshold, " + tag);
      if (p.cls[i] == PairClass::kHigh && r.shuttles[i] > 2 * ((2 * t + q - 1) / q)) f.add("shuttles, " + tag);
      if (p.cls[i] == PairClass::kPrime) {
        const std::int64_t s = p.rounded_size[i];
        if (s % p.p != 0 || s < p.p || s > l * p.p || s < t) f.add("rounded size, " + tag);
      }
    }
    if (static_cast<std::int64_t>(r.expanded_demands) > 2 * l * l) f.add("expansion, " + tag);
    if (!check_tour_feasible(inst, r.tour).ok() || !oracle::replay_feasible(inst, r.tour)) {
      f.add("infeasible, " + tag);
    }
  }
  return {f.count == 0, "300 instances, " + std::to_string(rounded) + " with rounding" + f.note()};
}

Outcome one_preemptive() {
  Failures f;
  std::vector<double> scaled;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto inst = fuzz::tiny_dar(5000 + i, 10, 1, 6, 4);
    const auto lb = lower_bounds(inst);
    const double n = static_cast<double>(inst.metric.size());
    const double budget = 50 * std::pow(std::log(n) + 1, 2) * std::max(lb.flow, lb.steiner);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto res = one_preemptive_solve_detailed(inst, s);
      const auto report = check_tour_feasible(inst, res.tour, true, 1);
      if (!report.ok() || !oracle::replay_feasible(inst, res.tour, 1)) {
        f.add("instance " + std::to_string(i) + " seed " + std::to_string(s));
      }
      if (budget > 0) scaled.push_back(res.length / budget);
    }
  }
  std::sort(scaled.begin(), scaled.end());
  const double median = scaled.empty() ? 0.0 : scaled[scaled.size() / 2];
  return {f.count == 0 && median <= 1.0,
          std::to_string(scaled.size()) + " runs, median length/budget " + fmt(median) + f.note(), 600};
}

Outcome hst_checks() {
  Failures f;
  const int n = 16;
  double total = 0.0;
  long pairs = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Metric m = gen_random_metric(n, seed);
    const Hst h = frt_embed(m, seed);
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) {
        const double dt = h.distance(u, v);
        if (dt < m(u, v)) f.add("not dominating, seed " + std::to_string(seed));
        if (m(u, v) > 0) {
          total += dt / m(u, v);
          ++pairs;
        }
      }
    }
  }
  const double mean = total / static_cast<double>(pairs);
  const double limit = 16 * std::log(static_cast<double>(n));
  return {f.count == 0 && mean <= limit,
          "mean distortion " + fmt(mean) + " (limit " + fmt(limit) + ")" + f.note()};
}

Outcome euclid_gap() {
  const auto path = std::filesystem::temp_directory_path() /
                    ("kfdar_gap_" + std::to_string(::getpid()) + ".csv");
  std::ostringstream out, err;
  const int code = cli::run({"bench", "euclid-gap", "--sizes", "64,256,1024", "--seeds", "10",
                             "--seed", "0", "--out", path.string()},
                            out, err);
  if (code != 0) return {false, "bench exited " + std::to_string(code) + ": " + err.str(), 900};

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  auto col = [&](const char* name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  // seed -> (pairs, ratio)
  std::map<std::string, std::vector<std::pair<int, double>>> by_seed;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() < header.size() - 1) continue;
    const double len = std::stod(cells[col("length")]);
    const double lb = std::max(std::stod(cells[col("flow_lb")]), std::stod(cells[col("steiner_lb")]));
    by_seed[cells[col("seed")]].emplace_back(std::stoi(cells[col("m")]), len / lb);
  }
  std::filesystem::remove(path);

  int good = 0;
  std::string ratios;
  for (auto& [seed, rs] : by_seed) {
    std::sort(rs.begin(), rs.end());
    bool ok = rs.size() == 3;
    for (std::size_t i = 1; i < rs.size(); ++i) ok = ok && rs[i].second >= rs[i - 1].second;
    good += ok ? 1 : 0;
  }
  if (by_seed.count("0")) {
    for (const auto& [pairs, ratio] : by_seed["0"]) ratios += " " + fmt(ratio);
  }
  return {good >= 8 && by_seed.size() == 10,
          std::to_string(good) + "/" + std::to_string(by_seed.size()) +
              " seeds non-decreasing; seed 0 ratios" + ratios,
          900};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"monotone subsequence, all permutations q <= 8", erdos_szekeres},
      {"ratio algorithms within 18 sqrt(k) and 16 sqrt(n) of the oracle", ratio_bounds},
      {"k-forest greedy coverage and cost", kforest_bounds},
      {"path5 oracle values", path5_regression},
      {"batch decomposition constant", structure_constant},
      {"dial-a-ride end to end", dar_end_to_end},
      {"sqrt-k trees respect a sqrt(capacity) load", sqrt_k_load},
      {"non-uniform encoding and greedy subproblem", nonuniform_checks},
      {"weighted partition and pipeline", weighted_checks},
      {"1-preemptive feasibility and median length", one_preemptive},
      {"tree embedding dominance and distortion", hst_checks},
      {"euclidean gap direction", euclid_gap},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (o.budget_s > 0 && secs > o.budget_s) {
      o.pass = false;
      o.detail += "; runtime over " + fmt(o.budget_s) + " s";
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << (i + 1) << ": "
              << criteria[i].first << " -- " << o.detail << " (" << fmt(secs) << " s)" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
