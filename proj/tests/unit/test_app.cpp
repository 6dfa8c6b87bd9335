#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rruc/app/commands.hpp"
#include "rruc/app/config.hpp"
#include "rruc/error.hpp"
#include "rruc/grid/case_io.hpp"
#include "rruc/oracles/oracles.hpp"

using namespace rruc;
using namespace rruc::app;
namespace fs = std::filesystem;

namespace {

const fs::path kData = RRUC_DATA_DIR;
const fs::path kCase = kData / "desk" / "case.json";
const fs::path kConfig = kData / "desk" / "a1.json";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rruc_app_" + name);
  fs::remove_all(dir);
  return dir;
}

CommandOptions into(const fs::path& dir, std::optional<std::string> algorithm = {}) {
  CommandOptions o;
  o.output_dir = dir.string();
  o.algorithm = std::move(algorithm);
  return o;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const char* kMinimal = R"({"prices": {"curtailment": [20, 40], "load_shed": [100, 200]}, "sigma": [0.2]})";

}  // namespace

TEST_CASE("config documents") {
  const auto c = load_config(kMinimal, 2);
  CHECK(c.algorithm == "a1");
  CHECK(c.prices.load_shed == std::vector<double>{100.0, 200.0});
  CHECK(std::isinf(c.risk_limit));

  const auto blocks = load_config(
      R"({"prices": [{"periods": [1, 1], "curtailment": 20, "load_shed": 100},
                     {"periods": [2, 3], "curtailment": 40, "load_shed": 200}],
          "sigma": [0.2], "risk_limit": 50})",
      3);
  CHECK(blocks.prices.curtailment == std::vector<double>{20.0, 40.0, 40.0});
  CHECK(blocks.risk_limit == 50.0);

  // Round trip through the serializer.
  const auto again = load_config(serialize_config(blocks), 3);
  CHECK(again.prices.load_shed == blocks.prices.load_shed);
  CHECK(again.risk_limit == blocks.risk_limit);

  CHECK_THROWS_AS(load_config(R"({"prices": [{"periods": [1, 1], "curtailment": 1, "load_shed": 2}],
                                  "sigma": [0.2]})", 2), InputError);
  CHECK_THROWS_AS(load_config(R"({"sigma": [0.2]})", 2), InputError);
  CHECK_THROWS_AS(load_config("{", 2), InputError);

  const auto system = grid::load_case_file(kCase);
  auto bad = load_config_file(kConfig, system.horizon());
  bad.penalty = 0.0;
  CHECK_THROWS_AS(bad.validate(system), InputError);
  bad = load_config_file(kConfig, system.horizon());
  bad.sigma.pop_back();
  CHECK_THROWS_AS(bad.validate(system), InputError);
  bad = load_config_file(kConfig, system.horizon());
  bad.algorithm = "suc";
  CHECK_THROWS_AS(bad.validate(system), InputError);
}

TEST_CASE("solve writes a breakdown row and a verifiable solution") {
  const auto dir = scratch("solve");
  const auto r = cmd_solve(kCase, kConfig, into(dir));
  INFO(r.message);
  REQUIRE(r.exit_code == kOk);
  for (const auto& f : r.files) CHECK(fs::exists(f));
  const auto rows = lines_of(slurp(dir / "breakdown.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == breakdown_header());
  CHECK(rows[1].rfind("a1,converged,", 0) == 0);
  CHECK(fs::exists(dir / "band.csv"));

  const auto log = lines_of(slurp(dir / "iterations.jsonl"));
  const auto stored = load_solution_file(dir / "solution.json");
  CHECK(log.size() == stored.vertex_log.size());
  for (std::size_t i = 0; i < log.size(); ++i)
    CHECK(nlohmann::json::parse(log[i])["vertex"].get<std::string>() == stored.vertex_log[i]);

  SUBCASE("fresh solution passes verification") {
    const auto v = cmd_verify(kCase, kConfig, dir / "solution.json", into(dir));
    INFO(v.message);
    CHECK(v.exit_code == kOk);
    CHECK(slurp(dir / "verdict.txt").find("verdict: pass") != std::string::npos);
  }
  SUBCASE("tampered solution fails with itemized reasons") {
    auto doc = nlohmann::json::parse(slurp(dir / "solution.json"));
    // Widen the band to the full range: robustness must break.
    const double cap[] = {150.0, 100.0};
    for (std::size_t m = 0; m < 2; ++m)
      for (auto& x : doc["w_upper"][m]) x = cap[m];
    for (auto& row : doc["w_lower"])
      for (auto& x : row) x = 0.0;
    std::ofstream(dir / "tampered.json") << doc.dump();
    const auto v = cmd_verify(kCase, kConfig, dir / "tampered.json", into(dir));
    INFO(v.message);
    CHECK(v.exit_code == kInfeasible);
    const auto verdict = slurp(dir / "verdict.txt");
    CHECK(verdict.find("FAIL robustness") != std::string::npos);
    CHECK(verdict.find("verdict: fail") != std::string::npos);
  }
  SUBCASE("missing solution file is an input error") {
    const auto v = cmd_verify(kCase, kConfig, dir / "nope.json", into(dir));
    CHECK(v.exit_code == kInputError);
  }
}

TEST_CASE("DUC row has no band file") {
  const auto dir = scratch("duc");
  const auto r = cmd_solve(kCase, kConfig, into(dir, "duc"));
  INFO(r.message);
  REQUIRE(r.exit_code == kOk);
  CHECK_FALSE(fs::exists(dir / "band.csv"));
  const auto rows = lines_of(slurp(dir / "breakdown.csv"));
  CHECK(rows[1].rfind("duc,converged,", 0) == 0);
  // The reserve row is in force.
  const auto stored = load_solution_file(dir / "solution.json");
  const auto system = grid::load_case_file(kCase);
  for (int t = 0; t < system.horizon(); ++t) {
    double online = 0.0, output = 0.0, demand = 0.0;
    for (std::size_t g = 0; g < system.num_generators(); ++g) {
      online += stored.master.u[g][static_cast<std::size_t>(t)] * system.generators()[g].p_max;
      output += stored.master.p[g][static_cast<std::size_t>(t)];
    }
    for (const auto& l : system.loads()) demand += l.demand[static_cast<std::size_t>(t)];
    CHECK(online - output >= 0.1 * demand - 1e-6);
  }
}

TEST_CASE("zero risk budget on the desk is infeasible with an MFRL hint") {
  const auto dir = scratch("risk0");
  const auto r = cmd_solve(kCase, kData / "desk" / "risk0.json", into(dir));
  CHECK(r.exit_code == kInfeasible);
  CHECK(r.message.find("minimum feasible risk level") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "solution.json"));
  for (const auto& f : r.files) CHECK(fs::exists(f));
}

TEST_CASE("input errors exit with 1") {
  const auto dir = scratch("input");
  CHECK(cmd_solve(kData / "missing.json", kConfig, into(dir)).exit_code == kInputError);
  CHECK(cmd_solve(kCase, kConfig, into(dir, "suc")).exit_code == kInputError);
  CHECK(cmd_evaluate(kCase, kConfig, {dir / "x.json"}, std::size_t{0}, {}, into(dir)).exit_code == kInputError);
}

TEST_CASE("sweep") {
  SUBCASE("single level gives one row and no MFRL") {
    const auto dir = scratch("sweep1");
    const auto r = cmd_sweep(kCase, kConfig, {30.0}, into(dir));
    INFO(r.message);
    REQUIRE(r.exit_code == kOk);
    CHECK(lines_of(slurp(dir / "sweep.csv")).size() == 2);
    CHECK_FALSE(fs::exists(dir / "mfrl.json"));
  }
  SUBCASE("an infeasible level brackets the MFRL") {
    const auto dir = scratch("sweep2");
    const auto r = cmd_sweep(kCase, kConfig, {0.0, 30.0}, into(dir));
    INFO(r.message);
    REQUIRE(r.exit_code == kOk);
    const auto rows = lines_of(slurp(dir / "sweep.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].rfind("30.0000,converged,", 0) == 0);
    CHECK(rows[2].rfind("0.0000,infeasible-risk-level,", 0) == 0);
    const auto m = nlohmann::json::parse(slurp(dir / "mfrl.json"));
    CHECK(m["feasible_bound"].get<double>() - m["infeasible_bound"].get<double>() <= 1.0);
  }
}

TEST_CASE("evaluate is deterministic for a fixed seed") {
  const auto dir = scratch("evaluate");
  REQUIRE(cmd_solve(kCase, kConfig, into(dir, "duc")).exit_code == kOk);
  const auto sol = dir / "solution.json";
  REQUIRE(cmd_evaluate(kCase, kConfig, {sol}, std::size_t{300}, std::uint64_t{11}, into(dir / "a")).exit_code == kOk);
  REQUIRE(cmd_evaluate(kCase, kConfig, {sol}, std::size_t{300}, std::uint64_t{11}, into(dir / "b")).exit_code == kOk);
  const auto a = slurp(dir / "a" / "evaluation.csv");
  CHECK(a == slurp(dir / "b" / "evaluation.csv"));
  const auto rows = lines_of(a);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("# ", 0) == 0);
  CHECK(rows[2].find(",300,") != std::string::npos);
}

TEST_CASE("benchmark rows agree on the objective") {
  const auto dir = scratch("bench");
  auto o = into(dir);
  const auto r = cmd_benchmark(kCase, kConfig, o);
  INFO(r.message);
  REQUIRE(r.exit_code == kOk);
  const auto rows = lines_of(slurp(dir / "benchmark.csv"));
  CHECK(rows[0] == "algorithm,budget_temporal,budget_spatial,status,objective,total_s,mp_s,fac_sp_s,iterations,"
                   "sp_auxiliaries");
  REQUIRE(rows.size() == 7);  // two budgets, three algorithms
  for (std::size_t b = 0; b < 2; ++b) {
    std::vector<double> obj;
    for (std::size_t k = 0; k < 3; ++k) {
      std::stringstream ss(rows[1 + 3 * b + k]);
      std::string cell;
      for (int i = 0; i < 5; ++i) std::getline(ss, cell, ',');
      obj.push_back(std::stod(cell));
    }
    for (double x : obj) CHECK(std::abs(x - obj[0]) <= 2e-4 * std::abs(obj[0]) + 1e-3);
  }
}
