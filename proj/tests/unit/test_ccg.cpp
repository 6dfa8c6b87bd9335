#include <doctest.h>

#include <cmath>

#include "../support/fixtures.hpp"
#include "rruc/ccg/engine.hpp"
#include "rruc/error.hpp"
#include "rruc/formulations/master.hpp"
#include "rruc/grid/dc_network.hpp"
#include "rruc/oracles/oracles.hpp"

using namespace rruc;
using namespace rruc::ccg;

namespace {

const risk::Prices kPrices{{20.0, 40.0}, {100.0, 200.0}};

// Desk system with a second farm at bus 3 so that budgets interact.
grid::PowerSystem two_farm_desk(double line_cap = 40.0) {
  const auto base = testing::desk(line_cap);
  auto wind = base.wind();
  wind.push_back({"w2", 2, 60.0, {25.0, 30.0}});
  return grid::PowerSystem::create(base.buses(), base.generators(), base.lines(), wind, base.loads(), 2);
}

struct Instance {
  grid::PowerSystem system;
  grid::Ptdf ptdf;
  risk::RiskTangents risk;
  Problem problem;

  Instance(grid::PowerSystem s, Budget budget, double risk_limit = milp::kInf)
      : system(std::move(s)), ptdf(grid::compute_ptdf(system)) {
    std::vector<double> rel(system.num_wind(), 0.2);
    risk = risk::build_system_tangents(system, risk::make_error_model(system, rel), kPrices, risk::RiskSettings{});
    problem.system = &system;
    problem.ptdf = &ptdf;
    problem.risk = &risk;
    problem.prices = kPrices;
    problem.budget = budget;
    problem.master.risk_limit = risk_limit;
  }
  Instance(const Instance&) = delete;
};

milp::SolverConfig solver() {
  milp::SolverConfig c;
  c.mip_gap = 1e-4;
  c.big_m = 100.0;
  return c;
}

double gap_tol(double objective) { return 2.0 * solver().mip_gap * std::abs(objective) + 1e-6; }

}  // namespace

TEST_CASE("zero budget converges in one iteration") {
  Instance inst(testing::desk(40.0), {0, 0});
  const auto sol = run_a1(inst.problem, solver(), {});
  CHECK(sol.status == RunStatus::converged);
  CHECK(sol.iterations() == 1);
  CHECK(sol.final_residual == doctest::Approx(0.0));
}

TEST_CASE("A1, A2, A3 and the extensive form agree") {
  for (const Budget b : {Budget{1, 1}, Budget{2, 1}, Budget{2, 2}}) {
    Instance inst(two_farm_desk(), b);
    const auto ext = run_extensive(inst.problem, solver());
    REQUIRE(ext.status == RunStatus::converged);
    for (auto alg : {Algorithm::a1, Algorithm::a2, Algorithm::a3}) {
      CAPTURE(to_string(alg));
      const auto sol = run(alg, inst.problem, solver(), {});
      REQUIRE(sol.status == RunStatus::converged);
      CHECK(std::abs(sol.objective() - ext.objective()) <= gap_tol(ext.objective()));
      // Added vertices never repeat and the master bound never drops. The
      // final record certifies convergence and adds nothing.
      for (std::size_t i = 1; i < sol.log.size(); ++i) {
        CHECK(sol.log[i].master_objective >= sol.log[i - 1].master_objective - gap_tol(sol.log[i].master_objective));
        if (i + 1 == sol.log.size()) continue;
        for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(sol.log[i].vertex == sol.log[j].vertex);
      }
      CHECK(sol.log.back().scenario_cuts == static_cast<std::size_t>(sol.iterations() - 1));
      CHECK(sol.iterations() <= static_cast<int>(oracles::enumerate_vertices(2, 2, b).size()));
      // Independent re-verification of robustness.
      const auto wc = oracles::brute_force_worst_case(inst.system, sol.master.u, sol.master.w_upper,
                                                      sol.master.w_lower, b);
      CHECK(wc.residual <= 1e-3);
    }
  }
}

TEST_CASE("A3 cuts are recorded and separate their point") {
  Instance inst(two_farm_desk(), {2, 1});
  std::vector<IterationRecord> seen;
  const auto sol = run(Algorithm::a3, inst.problem, solver(), {}, [&](const IterationRecord& r) { seen.push_back(r); });
  REQUIRE(sol.status == RunStatus::converged);
  CHECK(seen.size() == sol.log.size());
  if (sol.iterations() > 1) CHECK(sol.log.front().feasibility_cuts >= 1);
}

TEST_CASE("converged solutions pass the composite verifier") {
  Instance inst(two_farm_desk(), {1, 1}, 3000.0);
  const auto sol = run_a1(inst.problem, solver(), {});
  REQUIRE(sol.status == RunStatus::converged);
  oracles::VerifySettings vs;
  vs.risk_limit = 3000.0;
  const auto verdict = oracles::verify_solution(sol.master, inst.system, inst.risk, kPrices, {1, 1}, vs);
  for (const auto& f : verdict.findings) INFO(f.item << ": " << f.detail);
  CHECK(verdict.passed());
  CHECK(sol.master.risk_envelope <= 3000.0 + 1e-6);
  CHECK(sol.penalty_cost == doctest::Approx(0.1 * sol.master.risk_envelope));
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t t = 0; t < 2; ++t) {
      CHECK(sol.master.w_lower[m][t] <= inst.system.wind()[m].forecast[t] + 1e-9);
      CHECK(sol.master.w_upper[m][t] >= inst.system.wind()[m].forecast[t] - 1e-9);
    }
}

TEST_CASE("residual-change stopping rule and iteration limit") {
  Instance inst(two_farm_desk(), {2, 2});
  ConvergenceConfig c;
  c.max_iterations = 1;
  const auto capped = run_a1(inst.problem, solver(), c);
  if (capped.final_residual > 1e-3) CHECK(capped.status == RunStatus::iteration_limit);
  ConvergenceConfig bad;
  bad.feasibility_tol = 0.0;
  CHECK_THROWS_AS(run_a1(inst.problem, solver(), bad), InputError);
}

TEST_CASE("admissibility assessment") {
  SUBCASE("over-capacity single bus takes the full range at zero risk") {
    const auto s = testing::single_bus(0.0, 1000.0, {300.0, 300.0}, {100.0, 120.0}, 200.0);
    Instance inst(s, {2, 1});
    const auto a = assess_admissibility(inst.problem, {{1.0, 1.0}}, solver(), {});
    CHECK(a.status == RunStatus::converged);
    CHECK(a.w_upper[0] == std::vector<double>{200.0, 200.0});
    CHECK(a.w_lower[0] == std::vector<double>{0.0, 0.0});
    CHECK(a.risk_envelope == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("desk band is robust and its risk matches quadrature") {
    Instance inst(two_farm_desk(), {1, 1});
    const formulations::Matrix u{{1.0, 1.0}, {1.0, 1.0}};
    const auto a = assess_admissibility(inst.problem, u, solver(), {});
    REQUIRE(a.status == RunStatus::converged);
    const auto wc = oracles::brute_force_worst_case(inst.system, u, a.w_upper, a.w_lower, {1, 1});
    CHECK(wc.residual <= 1e-3);
    double bound = 0.0;
    for (const auto& c : inst.risk.cells) bound += c.max_gap_upper + c.max_gap_lower;
    CHECK(a.risk_exact >= a.risk_envelope - 1e-6);
    CHECK(a.risk_exact - a.risk_envelope <= bound + 1e-6);
  }
}

TEST_CASE("risk sweep and minimum feasible risk level") {
  Instance inst(two_farm_desk(), {1, 1});
  // Exact minimum of ΣQ over the robust feasible set, from the extensive form.
  auto p = inst.problem;
  p.master.objective = formulations::MasterObjective::risk_only;
  milp::SolverConfig tight = solver();
  tight.mip_gap = 1e-7;
  const auto least = run_extensive(p, tight);
  REQUIRE(least.status == RunStatus::converged);
  const double floor = least.master.risk_envelope;

  const std::vector<double> levels{milp::kInf, floor + 400.0, floor + 100.0, std::max(0.0, floor - 50.0)};
  const auto rep = sweep_risk_levels(inst.problem, levels, solver(), {});
  REQUIRE(rep.points.size() == levels.size());
  CHECK(rep.points.back().status == RunStatus::infeasible_risk_level);
  for (std::size_t i = 1; i + 1 < rep.points.size(); ++i)
    CHECK(rep.points[i].cost >= rep.points[i - 1].cost - gap_tol(rep.points[i].cost));
  REQUIRE(rep.mfrl);
  CHECK(rep.feasible_bound - rep.infeasible_bound <= 1.0);
  CHECK(*rep.mfrl >= floor - 1e-4);
  CHECK(*rep.mfrl <= floor + 1.0 + 1e-4);

  CHECK_THROWS_AS(sweep_risk_levels(inst.problem, {1.0, 2.0}, solver(), {}), InputError);
}
