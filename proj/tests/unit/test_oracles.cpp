#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "../support/fixtures.hpp"
#include "rruc/error.hpp"
#include "rruc/formulations/master.hpp"
#include "rruc/formulations/recourse.hpp"
#include "rruc/formulations/subproblem.hpp"
#include "rruc/grid/dc_network.hpp"
#include "rruc/oracles/oracles.hpp"

using namespace rruc;
using namespace rruc::oracles;
using formulations::FirstStagePoint;
using formulations::NetworkForm;

namespace {

risk::RiskTangents desk_risk(const grid::PowerSystem& s, const risk::Prices& prices) {
  const std::vector<double> rel{0.2};
  return risk::build_system_tangents(s, risk::make_error_model(s, rel), prices, risk::RiskSettings{});
}

const risk::Prices kDeskPrices{{20.0, 40.0}, {100.0, 200.0}};

}  // namespace

TEST_CASE("vertex enumeration") {
  CHECK(enumerate_vertices(2, 2, {0, 0}).size() == 1);
  const auto v = enumerate_vertices(2, 2, {1, 1});
  CHECK(v.size() == 17);
  CHECK(enumerate_vertices(2, 2, {2, 2}).size() == 81);
  CHECK(enumerate_vertices(1, 3, {5, 5}).size() == 27);
  CHECK(v.front() == ScenarioVertex::zero(2, 2));
  std::set<ScenarioVertex> unique(v.begin(), v.end());
  CHECK(unique.size() == v.size());
  for (const auto& x : v) CHECK(x.satisfies({1, 1}));
  CHECK(enumerate_vertices(2, 2, {1, 1}) == v);
  CHECK_THROWS_AS(enumerate_vertices(3, 4, {4, 3}, 100), InputError);
}

TEST_CASE("oracle recourse LP by hand") {
  // Gen [0, 100] on, D = 50, wind 60: single balance row, 10 MW spilled.
  const auto s = testing::single_bus(0.0, 100.0, {50.0}, {20.0}, 100.0);
  const Matrix u{{1.0}};
  const auto r = recourse_lp(s, u, {{60.0}});
  REQUIRE(r.feasible);
  CHECK(r.objective == doctest::Approx(10.0));
  CHECK(r.curtailment == doctest::Approx(10.0));
  CHECK(r.shed == doctest::Approx(0.0));
  const risk::Prices prices{{20.0}, {100.0}};
  const auto weighted = recourse_lp(s, u, {{60.0}}, &prices);
  CHECK(weighted.objective == doctest::Approx(200.0));
  CHECK(weighted.curtailment_loss == doctest::Approx(200.0));
  CHECK(recourse_lp(s, u, {{20.0}}).objective == doctest::Approx(0.0));
  // Unit off: everything is shed.
  CHECK(recourse_lp(s, {{0.0}}, {{20.0}}).shed == doctest::Approx(30.0));
}

TEST_CASE("oracle recourse respects line limits") {
  // Cheap unit behind a 30 MW line cannot serve 50 MW alone.
  const auto base = testing::triangle(10.0, 30.0);
  const auto r = recourse_lp(base, {{1.0}, {0.0}}, {});
  REQUIRE(r.feasible);
  // Both paths into bus 2 carry at most 30 MW each, flows split 2/3 - 1/3 so
  // 45 MW is the most bus 1 can deliver.
  CHECK(r.shed == doctest::Approx(5.0));
}

TEST_CASE("brute force worst case on the single-bus example") {
  const auto s = testing::single_bus(0.0, 100.0, {50.0}, {20.0}, 100.0);
  const auto wc = brute_force_worst_case(s, {{1.0}}, {{60.0}}, {{0.0}}, {1, 1});
  CHECK(wc.evaluated == 3);
  CHECK(wc.residual == doctest::Approx(10.0));
  CHECK(wc.vertex.u(0, 0) == 1);
  const auto zero = brute_force_worst_case(s, {{1.0}}, {{60.0}}, {{0.0}}, {0, 0});
  CHECK(zero.residual == doctest::Approx(0.0));
  CHECK(zero.vertex == ScenarioVertex::zero(1, 1));
}

TEST_CASE("brute force equals both big-M subproblems on random instances") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  milp::SolverConfig cfg;
  cfg.mip_gap = 1e-7;
  cfg.big_m = 50.0;
  int compared = 0;
  for (int k = 0; k < 50; ++k) {
    auto base = testing::desk(30.0 + 40.0 * unit(rng));
    // Second farm at bus 3 with its own forecast.
    auto wind = base.wind();
    wind.push_back({"w2", 2, 60.0, {10.0 + 30.0 * unit(rng), 10.0 + 30.0 * unit(rng)}});
    const auto s = grid::PowerSystem::create(base.buses(), base.generators(), base.lines(), wind,
                                             base.loads(), 2);
    const auto ptdf = grid::compute_ptdf(s);
    FirstStagePoint p;
    p.u = {{1.0, 1.0}, {unit(rng) < 0.5 ? 0.0 : 1.0, 1.0}};
    for (const auto& farm : s.wind()) {
      p.w_upper.emplace_back();
      p.w_lower.emplace_back();
      for (double f : farm.forecast) {
        p.w_upper.back().push_back(f + (farm.capacity - f) * unit(rng));
        p.w_lower.back().push_back(f * unit(rng));
      }
    }
    const formulations::Budget b{1 + static_cast<int>(unit(rng) * 2), 1 + static_cast<int>(unit(rng) * 2)};
    const auto wc = brute_force_worst_case(s, p.u, p.w_upper, p.w_lower, b);
    for (auto form : {NetworkForm::ptdf, NetworkForm::nodal}) {
      const auto rs = formulations::build_recourse(s, ptdf, form);
      const auto sp = formulations::solve_subproblem(rs, s, p, b, cfg);
      if (!std::isfinite(wc.residual)) {
        CHECK_FALSE(std::isfinite(sp.residual));
        continue;
      }
      CHECK(std::abs(sp.residual - wc.residual) <= 1e-6);
      ++compared;
    }
  }
  CHECK(compared > 50);
}

TEST_CASE("serial and parallel brute force agree exactly") {
  const auto s = testing::desk(40.0);
  const Matrix u{{1.0, 1.0}, {1.0, 1.0}};
  const Matrix wu{{90.0, 100.0}}, wl{{5.0, 10.0}};
  const auto a = brute_force_worst_case(s, u, wu, wl, {2, 1}, Execution::serial);
  const auto b = brute_force_worst_case(s, u, wu, wl, {2, 1}, Execution::parallel);
  CHECK(a.residual == b.residual);
  CHECK(a.vertex == b.vertex);
  CHECK(a.residuals == b.residuals);
}

TEST_CASE("Monte-Carlo rare-event loss") {
  const auto s = testing::desk();
  const std::vector<double> rel{0.2};
  const auto errors = risk::make_error_model(s, rel);
  const Matrix u{{1.0, 1.0}, {1.0, 1.0}};
  MonteCarloSettings mc;
  mc.samples = 200;
  mc.seed = 11;

  SUBCASE("a band covering everything leaves nothing to sample") {
    CHECK_THROWS_AS(monte_carlo_rare_event_loss(s, u, {{100.0, 100.0}}, {{0.0, 0.0}}, errors, kDeskPrices, mc),
                    ModelError);
  }
  SUBCASE("fixed seed is reproducible and parallelism changes nothing") {
    const Matrix wu{{50.0, 65.0}}, wl{{30.0, 45.0}};
    const auto a = monte_carlo_rare_event_loss(s, u, wu, wl, errors, kDeskPrices, mc, Execution::serial);
    const auto b = monte_carlo_rare_event_loss(s, u, wu, wl, errors, kDeskPrices, mc, Execution::parallel);
    const auto c = monte_carlo_rare_event_loss(s, u, wu, wl, errors, kDeskPrices, mc, Execution::parallel);
    CHECK(a.average_loss == b.average_loss);
    CHECK(b.average_loss == c.average_loss);
    CHECK(a.draws == c.draws);
    CHECK(a.samples == 200);
    CHECK(a.average_loss == doctest::Approx(a.average_curtailment_loss + a.average_shed_loss));
    CHECK(a.infeasible_share == 0.0);
  }
  SUBCASE("flexible system absorbs every deviation") {
    auto big = testing::single_bus(0.0, 1000.0, {300.0, 300.0}, {100.0, 100.0}, 200.0);
    const auto e = risk::make_error_model(big, rel);
    const auto rep = monte_carlo_rare_event_loss(big, {{1.0, 1.0}}, {{100.0, 100.0}}, {{100.0, 100.0}}, e,
                                                 kDeskPrices, mc);
    CHECK(rep.samples == 200);
    CHECK(rep.draws == 200);
    CHECK(rep.average_loss == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("loss is nonincreasing in committed flexibility on the same stream") {
    const Matrix wu{{45.0, 60.0}}, wl{{35.0, 50.0}};
    const auto one = monte_carlo_rare_event_loss(s, {{1.0, 1.0}, {0.0, 0.0}}, wu, wl, errors, kDeskPrices, mc);
    const auto two = monte_carlo_rare_event_loss(s, u, wu, wl, errors, kDeskPrices, mc);
    CHECK(two.average_loss <= one.average_loss + 1e-9);
  }
}

TEST_CASE("verify_solution on an extensive-form optimum") {
  const auto s = testing::desk(40.0);
  const auto ptdf = grid::compute_ptdf(s);
  const auto risk = desk_risk(s, kDeskPrices);
  const formulations::Budget budget{1, 1};
  const auto vertices = enumerate_vertices(1, 2, budget);
  formulations::MasterSettings st;
  st.risk_limit = 5000.0;
  milp::SolverConfig cfg;
  cfg.mip_gap = 1e-6;
  const auto sol = formulations::solve_master(formulations::build_extensive(s, ptdf, &risk, st, vertices), cfg);
  REQUIRE(sol.status == milp::SolveStatus::optimal);
  VerifySettings vs;
  vs.risk_limit = st.risk_limit;
  const auto ok = verify_solution(sol, s, risk, kDeskPrices, budget, vs);
  for (const auto& f : ok.findings) INFO(f.item << ": " << f.detail);
  CHECK(ok.passed());

  SUBCASE("inflated upper band fails robustness") {
    auto bad = sol;
    for (auto& w : bad.w_upper[0]) w = std::min(100.0, w * 1.5);
    for (auto& w : bad.w_lower[0]) w = w * 0.5;
    const auto v = verify_solution(bad, s, risk, kDeskPrices, budget, vs);
    bool robust_failed = false;
    for (const auto& f : v.findings)
      if (f.item == "robustness") robust_failed = !f.passed;
    CHECK(robust_failed);
  }
  SUBCASE("zeroed risk terms fail the risk gap") {
    auto bad = sol;
    for (auto& q : bad.q_upper[0]) q = 0.0;
    for (auto& q : bad.q_lower[0]) q = 0.0;
    const auto v = verify_solution(bad, s, risk, kDeskPrices, budget, vs);
    bool gap_failed = false;
    for (const auto& f : v.findings)
      if (f.item == "risk-gap") gap_failed = !f.passed;
    CHECK(gap_failed);
  }
}
