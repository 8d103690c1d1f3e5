#include "kfdar/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "kfdar/dial_a_ride.hpp"
#include "kfdar/errors.hpp"
#include "kfdar/generators.hpp"
#include "kfdar/io.hpp"
#include "kfdar/kforest.hpp"
#include "kfdar/nonuniform.hpp"
#include "kfdar/oracles.hpp"
#include "kfdar/preemption.hpp"
#include "kfdar/ratio.hpp"
#include "kfdar/weighted.hpp"

namespace kfdar::cli {
namespace {

using Clock = std::chrono::steady_clock;

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = spdlog::stderr_color_mt("kfdar");
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("KFDAR_LOG")) l->set_level(spdlog::level::from_str(env));
    l->set_pattern("[%l] %v");
    return l;
  }();
  return log;
}

RatioAlgo parse_algo(const std::string& s) {
  if (s == "best") return RatioAlgo::kBest;
  if (s == "sqrt-k") return RatioAlgo::kSqrtK;
  if (s == "sqrt-n") return RatioAlgo::kSqrtN;
  throw InvalidArgument("unknown algorithm '" + s + "'");
}

std::string algo_name(RatioAlgo a) {
  switch (a) {
    case RatioAlgo::kSqrtK: return "sqrt-k";
    case RatioAlgo::kSqrtN: return "sqrt-n";
    default: return "best";
  }
}

KmstMode parse_kmst(const std::string& s) {
  if (s == "auto") return KmstMode::kAuto;
  if (s == "exact") return KmstMode::kExact;
  if (s == "heuristic") return KmstMode::kHeuristic;
  throw InvalidArgument("unknown k-MST mode '" + s + "'");
}

// True when every k-MST call the ratio algorithm makes is solved exactly.
bool exact_kmst(RatioAlgo algo, KmstMode mode, std::size_t n, std::size_t m) {
  if (mode == KmstMode::kExact) return true;
  if (mode == KmstMode::kHeuristic) return false;
  const bool k_ok = m <= kExactKmstLimit;
  const bool n_ok = n <= kExactKmstLimit;
  switch (algo) {
    case RatioAlgo::kSqrtK: return k_ok;
    case RatioAlgo::kSqrtN: return n_ok;
    default: return k_ok && n_ok;
  }
}

nlohmann::ordered_json tree_json(const TreeSolution& t) {
  nlohmann::ordered_json j;
  j["vertices"] = t.vertices;
  auto edges = nlohmann::ordered_json::array();
  for (auto [u, v] : t.edges) edges.push_back({u, v});
  j["edges"] = edges;
  j["length"] = t.length;
  return j;
}

struct Row {
  std::string instance;
  std::string problem;
  std::string algo;
  std::size_t n = 0;
  std::size_t m = 0;
  std::int64_t capacity = 0;
  int k = 0;
  std::uint64_t seed = 0;
  double length = 0.0;
  std::optional<double> flow;
  std::optional<double> steiner;
  std::optional<double> oracle;
  double wall_ms = 0.0;

  std::string csv() const {
    std::optional<double> ratio_lb;
    if (flow && steiner) {
      const double lb = std::max(*flow, *steiner);
      if (lb > 0) ratio_lb = length / lb;
    }
    std::optional<double> ratio_oracle;
    if (oracle && *oracle > 0) ratio_oracle = length / *oracle;
    std::ostringstream s;
    s << instance << ',' << problem << ',' << algo << ',' << n << ',' << m << ',' << capacity << ','
      << k << ',' << seed << ',' << num(length) << ',' << opt_num(flow) << ','
      << opt_num(steiner) << ',' << opt_num(oracle) << ',' << opt_num(ratio_lb) << ','
      << opt_num(ratio_oracle) << ',' << num(wall_ms);
    return s.str();
  }
};

// Runs tasks on `jobs` threads; results come back in task order.
std::vector<Row> run_tasks(const std::vector<std::function<Row()>>& tasks, int jobs) {
  std::vector<Row> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        rows[i] = tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<Row>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << r.csv() << '\n';
}

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// ---- solve ----

struct SolveArgs {
  std::string instance;
  std::string problem = "dar";
  std::string algo = "best";
  std::string kmst = "auto";
  std::uint64_t seed = 0;
  int repeats = 1;
  std::string out;
};

int report_tour(const DialARideInstance& inst, const Tour& tour, bool preemptive,
                const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto report = check_tour_feasible(inst, tour, preemptive, preemptive ? 1 : 0);
  if (!out_path.empty()) save_tour(out_path, tour);
  if (!report.ok()) {
    err << "solver produced an infeasible tour:\n" << report.summary() << '\n';
    return kExitInfeasible;
  }
  out << "feasible: yes (max load " << report.max_load << ")\n";
  return kExitOk;
}

int do_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const InstanceFile file = load_instance(a.instance);
  const RatioAlgo algo = parse_algo(a.algo);
  DarOptions opts;
  opts.algo = algo;
  opts.ratio.kmst_mode = parse_kmst(a.kmst);
  const auto t0 = Clock::now();
  logger()->info("solving {} with {}", a.problem, a.algo);

  if (a.problem == "ratio" || a.problem == "kforest") {
    const KForestInstance inst = file.kforest();
    const std::size_t n = inst.metric.size();
    const std::size_t m = inst.demands.size();
    const bool exact = exact_kmst(algo, opts.ratio.kmst_mode, n, m);
    const double rho = ratio_factor(algo, std::min<int>(inst.k, static_cast<int>(m)), n);
    const std::string alpha = exact ? "alpha=1 (exact k-MST)" : "alpha=1 assumed (heuristic k-MST)";
    nlohmann::ordered_json j;
    if (a.problem == "ratio") {
      const auto sol = ratio_solve(inst, algo, opts.ratio);
      out << "problem: ratio\nalgo: " << algo_name(sol.algo) << "\nratio: " << num(sol.ratio)
          << "\nlength: " << num(sol.tree.length) << "\ncovered: " << sol.covered.size() << '\n';
      out << "bound: ratio <= " << num(rho) << " * OPT_ratio (" << alpha << ")\n";
      j["trees"] = nlohmann::ordered_json::array({tree_json(sol.tree)});
      j["covered"] = sol.covered;
      j["ratio"] = sol.ratio;
    } else {
      const auto sol = kforest_solve(inst, algo, opts.ratio);
      const double factor = rho * (1.0 + std::log(static_cast<double>(inst.k)));
      out << "problem: kforest\nalgo: " << algo_name(algo) << "\nlength: " << num(sol.length)
          << "\nconnected: " << sol.connected.size() << "\nrounds: " << sol.rounds << '\n';
      out << "bound: length <= " << num(factor) << " * OPT (rho=" << num(rho) << ", " << alpha
          << ")\n";
      j["trees"] = nlohmann::ordered_json::array();
      for (const auto& t : sol.trees) j["trees"].push_back(tree_json(t));
      j["covered"] = sol.connected;
      j["length"] = sol.length;
    }
    out << "wall_ms: " << num(elapsed_ms(t0)) << '\n';
    if (!a.out.empty()) write_json_file(a.out, j);
    return kExitOk;
  }

  const DialARideInstance inst = file.dial_a_ride();
  const LowerBounds lb = lower_bounds(inst);
  const std::size_t m = inst.demands.size();
  auto print_lb = [&](double length) {
    out << "lower_bounds: flow=" << num(lb.flow) << " steiner=" << num(lb.steiner) << '\n';
    if (lb.best() > 0) out << "length/lower_bound: " << num(length / lb.best()) << '\n';
  };

  if (a.problem == "dar" || a.problem == "dar-weighted") {
    Tour tour;
    double length = 0.0;
    if (a.problem == "dar") {
      const auto res = dar_solve_detailed(inst, opts);
      tour = res.tour;
      length = res.length;
      out << "problem: dar\nalgo: " << algo_name(algo) << "\nlength: " << num(length)
          << "\nrounds: " << res.rounds.size() << '\n';
    } else {
      const auto res = weighted_dar_solve_detailed(inst, opts);
      tour = res.tour;
      length = res.length;
      out << "problem: dar-weighted\nalgo: " << algo_name(algo) << "\nlength: " << num(length)
          << "\npairs: low=" << res.partition.low.size() << " high=" << res.partition.high.size()
          << " prime=" << res.partition.prime.size() << '\n';
    }
    print_lb(length);
    const int cap = static_cast<int>(std::min<std::int64_t>(inst.capacity, std::max<std::size_t>(m, 1)));
    const double rho = ratio_factor(algo, cap, inst.metric.size());
    const bool exact = exact_kmst(algo, opts.ratio.kmst_mode, inst.metric.size(), m);
    out << "bound: length <= " << num(dar_bound_factor(std::max<std::size_t>(m, 1), rho))
        << " * OPT (rho=" << num(rho) << ", alpha=1" << (exact ? "" : " assumed") << ")\n";
    out << "wall_ms: " << num(elapsed_ms(t0)) << '\n';
    return report_tour(inst, tour, false, a.out, out, err);
  }

  if (a.problem == "dar-nonuniform") {
    const CostFunction cf = file.costs ? CostFunction::from_table(inst.metric.size(), *file.costs)
                                       : CostFunction::classical(inst.metric, inst.capacity, m);
    const auto res = nonuniform_dar_solve(cf, inst, opts);
    out << "problem: dar-nonuniform\nalgo: " << algo_name(algo) << "\ncost: " << num(res.cost)
        << "\nlength: " << num(tour_length(inst.metric, res.tour)) << "\nbatches: "
        << res.batches.size() << '\n';
    const double rho = ratio_factor(algo, static_cast<int>(std::max<std::size_t>(m, 1)),
                                    inst.metric.size());
    const double lm = std::log2(2.0 * static_cast<double>(std::max<std::size_t>(m, 1)));
    out << "bound: cost <= O(" << num(16 * rho) << " * log^2 m) * OPT (rho=" << num(rho)
        << ", log2(2m)=" << num(lm) << ")\n";
    out << "wall_ms: " << num(elapsed_ms(t0)) << '\n';
    // Capacity is priced by the cost function, so only the serve semantics are checked.
    DialARideInstance relaxed = inst;
    relaxed.capacity = std::max<std::int64_t>(inst.total_weight(), 1);
    return report_tour(relaxed, res.tour, false, a.out, out, err);
  }

  if (a.problem == "dar-preempt1") {
    if (a.repeats < 1) throw InvalidArgument("--repeats must be positive");
    const auto res = one_preemptive_best_of(inst, a.seed, a.repeats);
    out << "problem: dar-preempt1\nseed: " << a.seed << "\nrepeats: " << a.repeats
        << "\nlength: " << num(res.length) << '\n';
    print_lb(res.length);
    const double ln = std::log(static_cast<double>(inst.metric.size())) + 1.0;
    out << "bound: E[length] <= O(log^2 n) * OPT_preemptive (checked budget "
        << num(50 * ln * ln) << " * max(flow, steiner))\n";
    out << "wall_ms: " << num(elapsed_ms(t0)) << '\n';
    return report_tour(inst, res.tour, true, a.out, out, err);
  }

  throw InvalidArgument("unknown problem '" + a.problem + "'");
}

// ---- validate ----

int do_validate(const std::string& instance, const std::string& tour_path, int preemptions,
                std::ostream& out) {
  const DialARideInstance inst = load_instance(instance).dial_a_ride();
  const Tour tour = load_tour(tour_path);
  const auto report = check_tour_feasible(inst, tour, preemptions > 0, preemptions);
  out << "length: " << num(tour_length(inst.metric, tour)) << '\n';
  out << "max_load: " << report.max_load << '\n';
  if (report.ok()) {
    out << "ok\n";
    return kExitOk;
  }
  out << report.summary() << '\n';
  return kExitInfeasible;
}

// ---- oracle ----

int do_oracle(const std::string& instance, const std::string& problem, const std::string& out_path,
              std::ostream& out) {
  const InstanceFile file = load_instance(instance);
  if (problem == "ratio") {
    const auto sol = oracle::exact_ratio_oracle(file.kforest());
    out << "optimum_ratio: " << num(sol.ratio) << "\nlength: " << num(sol.tree.length)
        << "\ncovered:";
    for (DemandId id : sol.covered) out << ' ' << id;
    out << '\n';
    return kExitOk;
  }
  if (problem == "kforest") {
    const auto sol = oracle::exact_kforest_oracle(file.kforest());
    out << "optimum_length: " << num(sol.length) << "\ntrees: " << sol.trees.size() << '\n';
    return kExitOk;
  }
  if (problem == "dar" || problem == "dar-nonuniform") {
    const DialARideInstance inst = file.dial_a_ride();
    std::optional<CostFunction> cf;
    if (problem == "dar-nonuniform") {
      cf = file.costs ? CostFunction::from_table(inst.metric.size(), *file.costs)
                      : CostFunction::classical(inst.metric, inst.capacity, inst.demands.size());
    }
    const auto opt = oracle::exact_dar_oracle(inst, cf ? &*cf : nullptr);
    out << "optimum_length: " << num(opt.length) << '\n';
    if (!out_path.empty()) save_tour(out_path, opt.tour);
    return kExitOk;
  }
  throw InvalidArgument("unknown oracle problem '" + problem + "'");
}

// ---- bench ----

struct SweepArgs {
  std::string problem = "dar";
  std::string kind = "random";
  std::string algo = "best";
  int n = 5;
  int m = 4;
  int k = 0;
  std::int64_t capacity = 2;
  std::int64_t max_weight = 1;
  int seeds = 10;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

Row sweep_one(const SweepArgs& a, std::uint64_t seed) {
  Row row;
  row.problem = a.problem;
  row.algo = a.algo;
  row.seed = seed;
  const RatioAlgo algo = parse_algo(a.algo);
  DarOptions opts;
  opts.algo = algo;

  if (a.problem == "ratio" || a.problem == "kforest") {
    const int k = a.k > 0 ? std::min(a.k, a.m) : a.m;
    const auto inst = gen_random_metric_instance(a.n, a.m, k, seed);
    row.instance = "random-n" + std::to_string(a.n) + "-m" + std::to_string(a.m) + "-s" +
                   std::to_string(seed);
    row.n = inst.metric.size();
    row.m = inst.demands.size();
    row.k = k;
    const bool small = row.n <= oracle::kMaxRatioVertices && row.m <= oracle::kMaxRatioDemands;
    const auto t0 = Clock::now();
    if (a.problem == "ratio") {
      row.length = ratio_solve(inst, algo).ratio;
      row.wall_ms = elapsed_ms(t0);
      if (small) row.oracle = oracle::exact_ratio_oracle(inst).ratio;
    } else {
      row.length = kforest_solve(inst, algo).length;
      row.wall_ms = elapsed_ms(t0);
      if (small) row.oracle = oracle::exact_kforest_oracle(inst).length;
    }
    return row;
  }

  DialARideInstance inst;
  if (a.kind == "random") {
    inst = gen_random_dar_instance(a.n, a.m, a.capacity, a.max_weight, seed);
  } else if (a.kind == "line") {
    inst = gen_line_instance(a.n, a.m, a.capacity, a.max_weight, seed);
  } else if (a.kind == "euclidean") {
    inst = gen_euclidean_random(a.m, seed);
  } else {
    throw InvalidArgument("unknown instance kind '" + a.kind + "'");
  }
  row.instance = a.kind + "-n" + std::to_string(inst.metric.size()) + "-m" +
                 std::to_string(inst.demands.size()) + "-s" + std::to_string(seed);
  row.n = inst.metric.size();
  row.m = inst.demands.size();
  row.capacity = inst.capacity;
  row.k = static_cast<int>(inst.capacity);
  const auto lb = lower_bounds(inst);
  row.flow = lb.flow;
  row.steiner = lb.steiner;

  const auto t0 = Clock::now();
  if (a.problem == "dar") {
    row.length = dar_solve_detailed(inst, opts).length;
  } else if (a.problem == "dar-weighted") {
    row.length = weighted_dar_solve_detailed(inst, opts).length;
  } else if (a.problem == "dar-preempt1") {
    row.algo = "frt";
    row.length = one_preemptive_solve_detailed(inst, seed).length;
  } else {
    throw InvalidArgument("unknown bench problem '" + a.problem + "'");
  }
  row.wall_ms = elapsed_ms(t0);
  // The non-preemptive optimum does not bound preemptive tours from below.
  const bool small = row.n <= oracle::kMaxDarVertices && row.m <= oracle::kMaxDarDemands;
  if (small && a.problem != "dar-preempt1") row.oracle = oracle::exact_dar_oracle(inst).length;
  return row;
}

void emit_csv(const std::vector<Row>& rows, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    write_csv(out, rows);
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot open '" + path + "' for writing");
  write_csv(f, rows);
}

int do_sweep(const SweepArgs& a, std::ostream& out) {
  parse_algo(a.algo);
  std::vector<std::function<Row()>> tasks;
  for (int i = 0; i < a.seeds; ++i) {
    const std::uint64_t s = a.seed + static_cast<std::uint64_t>(i);
    tasks.emplace_back([&a, s] { return sweep_one(a, s); });
  }
  auto rows = run_tasks(tasks, a.jobs);
  emit_csv(rows, a.out, out);
  return kExitOk;
}

struct GapArgs {
  std::vector<int> sizes{64, 256, 1024};
  int seeds = 10;
  std::uint64_t seed = 0;
  std::string algo = "sqrt-k";
  int jobs = 1;
  std::string out;
};

int do_euclid_gap(const GapArgs& a, std::ostream& out, std::ostream& err) {
  const RatioAlgo algo = parse_algo(a.algo);
  std::vector<std::function<Row()>> tasks;
  for (int i = 0; i < a.seeds; ++i) {
    for (int size : a.sizes) {
      const std::uint64_t s = a.seed + static_cast<std::uint64_t>(i);
      tasks.emplace_back([&a, algo, size, s] {
        const auto inst = gen_euclidean_random(size, s);
        Row row;
        row.instance = "euclid-" + std::to_string(size) + "-s" + std::to_string(s);
        row.problem = "dar";
        row.algo = a.algo;
        row.n = inst.metric.size();
        row.m = inst.demands.size();
        row.capacity = inst.capacity;
        row.k = static_cast<int>(inst.capacity);
        row.seed = s;
        const auto lb = lower_bounds(inst);
        row.flow = lb.flow;
        row.steiner = lb.steiner;
        DarOptions opts;
        opts.algo = algo;
        const auto t0 = Clock::now();
        row.length = dar_solve_detailed(inst, opts).length;
        row.wall_ms = elapsed_ms(t0);
        logger()->info("{}: length {} ratio {}", row.instance, row.length,
                       row.length / lb.best());
        return row;
      });
    }
  }
  const auto rows = run_tasks(tasks, a.jobs);
  emit_csv(rows, a.out, out);

  // Per seed: is length / max(flow, steiner) non-decreasing across sizes?
  std::ostream& summary = a.out.empty() ? err : out;
  int monotone = 0;
  const std::size_t per_seed = a.sizes.size();
  for (int i = 0; i < a.seeds; ++i) {
    bool ok = true;
    std::ostringstream line;
    line << "seed " << (a.seed + static_cast<std::uint64_t>(i)) << ':';
    double prev = -1.0;
    for (std::size_t j = 0; j < per_seed; ++j) {
      const Row& r = rows[static_cast<std::size_t>(i) * per_seed + j];
      const double ratio = r.length / std::max(*r.flow, *r.steiner);
      line << ' ' << num(ratio);
      if (ratio < prev) ok = false;
      prev = ratio;
    }
    if (ok) ++monotone;
    summary << line.str() << (ok ? " non-decreasing\n" : " decreasing step\n");
  }
  summary << "non-decreasing seeds: " << monotone << '/' << a.seeds << '\n';
  return kExitOk;
}

// ---- gen ----

struct GenArgs {
  int pairs = 16;
  int n = 6;
  int m = 4;
  int k = 0;
  std::int64_t capacity = 2;
  std::int64_t max_weight = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void write_instance(const InstanceFile& f, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << instance_to_json(f).dump(2) << '\n';
  } else {
    save_instance(path, f);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"k-forest and Dial-a-Ride approximation toolkit", "kfdar"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance file");
  gen_cmd->require_subcommand(1);
  auto* gen_eu = gen_cmd->add_subcommand("euclidean", "Random pairs in the unit square");
  gen_eu->add_option("--pairs", gen.pairs, "Number of demand pairs")->check(CLI::PositiveNumber);
  auto* gen_rm = gen_cmd->add_subcommand("random-metric", "k-forest instance on a random metric");
  gen_rm->add_option("--n", gen.n, "Vertices")->check(CLI::Range(2, 1 << 20));
  gen_rm->add_option("--m", gen.m, "Demands")->check(CLI::PositiveNumber);
  gen_rm->add_option("--k", gen.k, "Target pairs (default m)");
  auto* gen_rd = gen_cmd->add_subcommand("random-dar", "Dial-a-Ride instance on a random metric");
  auto* gen_ln = gen_cmd->add_subcommand("line", "Dial-a-Ride instance on the unit interval");
  for (auto* c : {gen_rd, gen_ln}) {
    c->add_option("--n", gen.n, "Vertices")->check(CLI::Range(2, 1 << 20));
    c->add_option("--m", gen.m, "Demands")->check(CLI::NonNegativeNumber);
    c->add_option("--capacity", gen.capacity, "Vehicle capacity")->check(CLI::PositiveNumber);
    c->add_option("--max-weight", gen.max_weight, "Largest demand size")->check(CLI::PositiveNumber);
  }
  for (auto* c : {gen_eu, gen_rm, gen_rd, gen_ln}) {
    c->add_option("--seed", gen.seed, "Random seed");
    c->add_option("--out", gen.out, "Output file (stdout when omitted)");
  }

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run an approximation algorithm");
  solve_cmd->add_option("instance", solve.instance, "Instance JSON")->required();
  solve_cmd->add_option("--problem", solve.problem)
      ->check(CLI::IsMember({"kforest", "ratio", "dar", "dar-nonuniform", "dar-weighted",
                             "dar-preempt1"}));
  solve_cmd->add_option("--algo", solve.algo, "Ratio algorithm")
      ->check(CLI::IsMember({"best", "sqrt-k", "sqrt-n"}));
  solve_cmd->add_option("--kmst", solve.kmst, "k-MST solver")
      ->check(CLI::IsMember({"auto", "exact", "heuristic"}));
  solve_cmd->add_option("--seed", solve.seed, "Random seed");
  solve_cmd->add_option("--repeats", solve.repeats, "Embeddings tried (dar-preempt1)")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--out", solve.out, "Write the tour (or forest) JSON here");

  std::string v_instance, v_tour;
  int v_preempt = 0;
  auto* validate_cmd = app.add_subcommand("validate", "Check a tour against an instance");
  validate_cmd->add_option("instance", v_instance)->required();
  validate_cmd->add_option("tour", v_tour)->required();
  validate_cmd->add_option("--preemptions", v_preempt, "Allowed intermediate drops per object")
      ->check(CLI::NonNegativeNumber);

  std::string o_instance, o_problem = "dar", o_out;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact solve of a small instance");
  oracle_cmd->add_option("instance", o_instance)->required();
  oracle_cmd->add_option("--problem", o_problem)
      ->check(CLI::IsMember({"ratio", "kforest", "dar", "dar-nonuniform"}));
  oracle_cmd->add_option("--out", o_out, "Write the optimal tour here");

  auto* bench_cmd = app.add_subcommand("bench", "Benchmark sweeps writing CSV");
  bench_cmd->require_subcommand(1);
  SweepArgs sweep;
  auto* sweep_cmd = bench_cmd->add_subcommand("sweep", "Seeded sweep of generated instances");
  sweep_cmd->add_option("--problem", sweep.problem)
      ->check(CLI::IsMember({"ratio", "kforest", "dar", "dar-weighted", "dar-preempt1"}));
  sweep_cmd->add_option("--kind", sweep.kind)->check(CLI::IsMember({"random", "line", "euclidean"}));
  sweep_cmd->add_option("--algo", sweep.algo)->check(CLI::IsMember({"best", "sqrt-k", "sqrt-n"}));
  sweep_cmd->add_option("--n", sweep.n)->check(CLI::Range(2, 1 << 20));
  sweep_cmd->add_option("--m", sweep.m)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--k", sweep.k, "Target pairs for ratio/kforest (default m)");
  sweep_cmd->add_option("--capacity", sweep.capacity)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--max-weight", sweep.max_weight)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seeds", sweep.seeds, "Number of instances")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sweep.seed, "First seed");
  sweep_cmd->add_option("--jobs", sweep.jobs)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep.out, "CSV file (stdout when omitted)");

  GapArgs gap;
  auto* gap_cmd = bench_cmd->add_subcommand("euclid-gap", "Random Euclidean gap experiment");
  gap_cmd->add_option("--sizes", gap.sizes, "Pair counts")->delimiter(',');
  gap_cmd->add_option("--seeds", gap.seeds)->check(CLI::PositiveNumber);
  gap_cmd->add_option("--seed", gap.seed, "First seed");
  gap_cmd->add_option("--algo", gap.algo)->check(CLI::IsMember({"best", "sqrt-k", "sqrt-n"}));
  gap_cmd->add_option("--jobs", gap.jobs)->check(CLI::PositiveNumber);
  gap_cmd->add_option("--out", gap.out, "CSV file (stdout when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_eu->parsed()) {
      write_instance(InstanceFile::from(gen_euclidean_random(gen.pairs, gen.seed)), gen.out, out);
    } else if (gen_rm->parsed()) {
      const int k = gen.k > 0 ? gen.k : gen.m;
      write_instance(InstanceFile::from(gen_random_metric_instance(gen.n, gen.m, k, gen.seed)),
                     gen.out, out);
    } else if (gen_rd->parsed()) {
      write_instance(InstanceFile::from(gen_random_dar_instance(gen.n, gen.m, gen.capacity,
                                                                gen.max_weight, gen.seed)),
                     gen.out, out);
    } else if (gen_ln->parsed()) {
      write_instance(InstanceFile::from(
                         gen_line_instance(gen.n, gen.m, gen.capacity, gen.max_weight, gen.seed)),
                     gen.out, out);
    } else if (solve_cmd->parsed()) {
      return do_solve(solve, out, err);
    } else if (validate_cmd->parsed()) {
      return do_validate(v_instance, v_tour, v_preempt, out);
    } else if (oracle_cmd->parsed()) {
      return do_oracle(o_instance, o_problem, o_out, out);
    } else if (sweep_cmd->parsed()) {
      return do_sweep(sweep, out);
    } else if (gap_cmd->parsed()) {
      return do_euclid_gap(gap, out, err);
    }
    return kExitOk;
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const TooLarge& e) {
    err << "too large: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInfeasible;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace kfdar::cli
