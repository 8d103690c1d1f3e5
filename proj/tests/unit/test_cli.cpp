#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "fuzz.hpp"
#include "kfdar/cli.hpp"
#include "kfdar/io.hpp"

using namespace kfdar;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / ("kfdar_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

}  // namespace

TEST_CASE("validate") {
  const auto inst = fuzz::fixture("line3.json");
  auto r = run({"validate", inst, fuzz::fixture("line3_tour.json")});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("ok") != std::string::npos);

  r = run({"validate", inst, fuzz::fixture("line3_bad_tour.json")});
  CHECK(r.code == cli::kExitInfeasible);

  r = run({"validate", inst});
  CHECK(r.code == cli::kExitUsage);
  r = run({"frobnicate"});
  CHECK(r.code == cli::kExitUsage);
  r = run({"validate", fuzz::fixture("missing.json"), fuzz::fixture("line3_tour.json")});
  CHECK(r.code == cli::kExitUsage);
}

TEST_CASE("gen, solve, validate round trip") {
  const auto dir = temp_dir();
  const std::string inst = (dir / "dar.json").string();
  const std::string tour = (dir / "tour.json").string();
  auto r = run({"gen", "random-dar", "--n", "6", "--m", "4", "--capacity", "2", "--seed", "3",
                "--out", inst});
  REQUIRE(r.code == 0);

  for (const std::string problem : {"dar", "dar-weighted", "dar-nonuniform", "dar-preempt1"}) {
    r = run({"solve", inst, "--problem", problem, "--out", tour});
    CHECK_MESSAGE(r.code == 0, problem << ": " << r.err);
    CHECK(r.out.find("feasible: yes") != std::string::npos);
    const std::string preempt = problem == "dar-preempt1" ? "1" : "0";
    r = run({"validate", inst, tour, "--preemptions", preempt});
    CHECK_MESSAGE(r.code == 0, problem << ": " << r.out);
  }

  r = run({"oracle", inst, "--problem", "dar", "--out", tour});
  CHECK(r.code == 0);
  r = run({"validate", inst, tour});
  CHECK(r.code == 0);

  const std::string kf = (dir / "kf.json").string();
  r = run({"gen", "random-metric", "--n", "6", "--m", "4", "--k", "2", "--seed", "1", "--out", kf});
  REQUIRE(r.code == 0);
  for (const std::string problem : {"kforest", "ratio"}) {
    r = run({"solve", kf, "--problem", problem, "--kmst", "exact"});
    CHECK_MESSAGE(r.code == 0, problem << ": " << r.err);
    r = run({"oracle", kf, "--problem", problem});
    CHECK(r.code == 0);
  }

  const std::string big = (dir / "big.json").string();
  r = run({"gen", "random-dar", "--n", "12", "--m", "9", "--capacity", "2", "--out", big});
  REQUIRE(r.code == 0);
  r = run({"oracle", big, "--problem", "dar"});
  CHECK(r.code == cli::kExitInfeasible);
  CHECK(r.err.find("too large") != std::string::npos);

  r = run({"solve", kf, "--problem", "dar", "--algo", "nope"});
  CHECK(r.code == cli::kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("bench sweep never beats the oracle") {
  const auto r = run({"bench", "sweep", "--problem", "dar", "--kind", "random", "--n", "5", "--m",
                      "4", "--capacity", "2", "--seeds", "50"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == cli::kCsvHeader);
  const auto header = split(line, ',');
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  int rows = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line, ',');
    REQUIRE(cells.size() == header.size());
    const double length = std::stod(cells[col("length")]);
    REQUIRE(!cells[col("oracle")].empty());
    const double opt = std::stod(cells[col("oracle")]);
    CHECK(length >= opt - 1e-9);
    CHECK(opt >= std::stod(cells[col("flow_lb")]) - 1e-9);
    CHECK(opt >= std::stod(cells[col("steiner_lb")]) - 1e-9);
    ++rows;
  }
  CHECK(rows == 50);
}
