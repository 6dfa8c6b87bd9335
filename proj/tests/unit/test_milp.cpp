#include <doctest.h>
#include <cmath>

#include "rruc/error.hpp"
#include "rruc/milp/model.hpp"
#include "rruc/milp/solver.hpp"

using namespace rruc;
using namespace rruc::milp;

namespace {

SolverConfig config() { return SolverConfig{}; }

}  // namespace

TEST_CASE("empty model solves with objective 0") {
  Model m;
  const auto out = solve(m, config());
  CHECK(out.status == SolveStatus::optimal);
  CHECK(out.objective == 0.0);
}

TEST_CASE("min x subject to x >= 3") {
  Model m;
  const auto x = m.add_continuous("x", -kInf, kInf);
  m.add_ge("c", x, 3.0);
  m.set_objective(Sense::minimize, x);
  const auto out = solve(m, config());
  REQUIRE(out.status == SolveStatus::optimal);
  CHECK(out.objective == doctest::Approx(3.0));
  CHECK(out.value(x) == doctest::Approx(3.0));
}

TEST_CASE("knapsack optimum equals subset enumeration") {
  const double values[] = {3, 4, 5};
  const double weights[] = {2, 3, 4};
  const double cap = 5;
  double best = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    double v = 0.0;
    double w = 0.0;
    for (int i = 0; i < 3; ++i)
      if (mask & (1 << i)) {
        v += values[i];
        w += weights[i];
      }
    if (w <= cap) best = std::max(best, v);
  }
  CHECK(best == 7.0);

  Model m;
  LinearExpr weight;
  LinearExpr value;
  for (int i = 0; i < 3; ++i) {
    const auto x = m.add_binary("x" + std::to_string(i));
    weight.add(x, weights[i]);
    value.add(x, values[i]);
  }
  m.add_le("cap", weight, cap);
  m.set_objective(Sense::maximize, value);
  const auto out = solve(m, config());
  REQUIRE(out.status == SolveStatus::optimal);
  CHECK(out.objective == doctest::Approx(best));
}

TEST_CASE("infeasible and unbounded models") {
  Model m;
  const auto x = m.add_continuous("x", -kInf, kInf);
  m.add_ge("lo", x, 1.0);
  m.add_le("hi", x, 0.0);
  m.set_objective(Sense::minimize, x);
  const auto out = solve(m, config());
  CHECK(out.status == SolveStatus::infeasible);
  CHECK_FALSE(out.has_values());

  Model u;
  const auto y = u.add_continuous("y", -kInf, kInf);
  u.add_le("hi", y, 4.0);
  u.set_objective(Sense::minimize, y);
  CHECK(solve(u, config()).status == SolveStatus::unbounded);
}

TEST_CASE("zero objective over a feasible set") {
  Model m;
  const auto x = m.add_binary("x");
  const auto y = m.add_continuous("y", 0, 10);
  m.add_ge("c", LinearExpr(x) + LinearExpr(y), 2.5);
  m.set_objective(Sense::minimize, LinearExpr(0.0));
  const auto out = solve(m, config());
  REQUIRE(out.status == SolveStatus::optimal);
  CHECK(out.objective == 0.0);
  CHECK(out.value(x) + out.value(y) >= 2.5 - 1e-7);
}

TEST_CASE("re-solving gives the same objective") {
  Model m;
  LinearExpr obj;
  LinearExpr cap;
  for (int i = 0; i < 12; ++i) {
    const auto x = m.add_binary("x" + std::to_string(i));
    obj.add(x, 1.0 + (i * 7 % 5));
    cap.add(x, 1.0 + (i * 3 % 4));
  }
  m.add_le("cap", cap, 11.0);
  m.set_objective(Sense::maximize, obj);
  const auto a = solve(m, config());
  const auto b = solve(m, config());
  REQUIRE(a.status == SolveStatus::optimal);
  CHECK(a.objective == b.objective);
  CHECK(a.values == b.values);
}

TEST_CASE("expression constants and duplicate terms") {
  Model m;
  const auto x = m.add_continuous("x", 0, kInf);
  LinearExpr e(x, 1.0);
  e.add(x, 1.0).add(4.0);  // 2x + 4 >= 10
  m.add_ge("c", e, 10.0);
  m.set_objective(Sense::minimize, LinearExpr(x) + LinearExpr(1.5));
  const auto out = solve(m, config());
  REQUIRE(out.status == SolveStatus::optimal);
  CHECK(out.value(x) == doctest::Approx(3.0));
  CHECK(out.objective == doctest::Approx(4.5));
}

TEST_CASE("row duals follow the bound-sensitivity convention") {
  // min y  s.t.  -y <= -4   (y >= 4); raising the bound -4 lowers the optimum
  Model m;
  const auto y = m.add_continuous("y", 0, kInf);
  m.add_le("r", LinearExpr(y, -1.0), -4.0);
  m.set_objective(Sense::minimize, y);
  const auto out = solve(m, config());
  REQUIRE(out.row_duals.size() == 1);
  CHECK(out.row_duals[0] == doctest::Approx(-1.0));
}

TEST_CASE("model construction errors") {
  Model m;
  CHECK_THROWS_AS(m.add_continuous("x", 2, 1), ModelError);
  const auto x = m.add_continuous("x", 0, 1);
  CHECK_THROWS_AS(m.add_le("c", LinearExpr(VarId{5}, 1.0), 1.0), ModelError);
  CHECK_THROWS_AS(m.add_le("c", LinearExpr(x, std::nan("")), 1.0), ModelError);
  SolverConfig bad;
  bad.mip_gap = 0.0;
  CHECK_THROWS_AS((void)solve(m, bad), InputError);
  bad = SolverConfig{};
  bad.backend = "cplex";
  CHECK_THROWS_AS((void)solve(m, bad), InputError);
}

TEST_CASE("check_bigm_slack threshold") {
  const std::vector<double> zeros(5, 0.0);
  CHECK(check_bigm_slack(zeros, 10.0, 0.01).empty());
  const std::vector<double> duals{0.0, -10.0, -3.0};
  const auto hits = check_bigm_slack(duals, 10.0, 0.01);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].position == 1);
}

TEST_CASE("lp text dump") {
  Model m;
  const auto x = m.add_binary("x");
  const auto y = m.add_continuous("y", 0, 5);
  m.add_constraint("c", LinearExpr(x) + LinearExpr(y, -2.0), 1.0, 3.0);
  m.set_objective(Sense::maximize, LinearExpr(y));
  const auto text = m.to_lp_text();
  CHECK(text.find("Maximize") == 0);
  CHECK(text.find("c: 1 x - 2 y >= 1") != std::string::npos);
  CHECK(text.find("Binaries\n x") != std::string::npos);
}
